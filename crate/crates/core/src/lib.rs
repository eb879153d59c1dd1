//! Exact, heuristic and dynamic-programming solvers for DAG Partitioning:
//! delete a minimum-weight set of arcs from a weighted DAG so that every
//! weakly connected component of what remains has exactly one sink.
//!
//! ```
//! use dagpart::{solve_minimize, Limits, ReductionMode, WeightedDag};
//!
//! let g = WeightedDag::new(3, [(2, 0, 3), (2, 1, 1)]).unwrap();
//! let (best, _) = solve_minimize(&g, ReductionMode::InterleavedReduction, Limits::none());
//! assert_eq!(best.unwrap().total_weight(), 1);
//! ```

pub mod error;
pub mod exact;
pub mod format;
pub mod generators;
pub mod graph;
pub mod heuristic;
pub mod oracle;
pub mod reduction;
pub mod treewidth;

pub use error::{Error, Result};
pub use exact::{
    solve_decision, solve_minimize, Decision, Exhaustion, Limits, MinimizeResult, ReductionMode, SearchConfig,
    SearchStats,
};
pub use generators::{CnfFormula, GenSpec};
pub use graph::{ArcId, PartitioningSet, Vertex, WeightedDag, Weight};
pub use heuristic::{heuristic_partition, heuristic_partition_reduced};
pub use oracle::{brute_force_min, enumerate_partial_solutions, sat_brute};
pub use reduction::{lift_witness, reduce, ReductionLog};
pub use treewidth::{solve_treewidth, TreeDecomposition, TreewidthSolution};
