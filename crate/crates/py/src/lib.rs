//! Python module `dagpart`.

use std::time::Duration;

use dagpart::exact::{solve_decision, solve_minimize, Decision, Limits, ReductionMode, SearchConfig};
use dagpart::format::{parse_instance, write_instance};
use dagpart::generators::{self, CnfFormula, GenSpec, DEFAULT_SEED};
use dagpart::treewidth::{self, TreeDecomposition, DEFAULT_WIDTH_CAP};
use dagpart::{PartitioningSet, Weight};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "WeightedDag", module = "dagpart", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyDag {
    inner: dagpart::WeightedDag,
}

#[pymethods]
impl PyDag {
    /// `arcs` holds `(tail, head, weight)` triples over 0-based vertex ids.
    #[new]
    fn new(n: usize, arcs: Vec<(usize, usize, Weight)>) -> PyResult<Self> {
        dagpart::WeightedDag::new(n, arcs).map(|inner| PyDag { inner }).map_err(err)
    }

    /// Reads the `p dagp` text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_instance(text).map(|inner| PyDag { inner }).map_err(err)
    }

    fn to_text(&self) -> String {
        write_instance(&self.inner)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn arc_count(&self) -> usize {
        self.inner.arc_count()
    }

    #[getter]
    fn total_weight(&self) -> Weight {
        self.inner.total_weight()
    }

    fn arcs(&self) -> Vec<(usize, usize, Weight)> {
        self.inner.arcs().collect()
    }

    fn sinks(&self) -> Vec<usize> {
        self.inner.sinks()
    }

    fn reverse_topological_order(&self) -> Vec<usize> {
        self.inner.reverse_topological_order()
    }

    /// Whether deleting the given arc ids leaves one sink per component.
    fn is_partitioning_set(&self, arc_ids: Vec<usize>) -> PyResult<bool> {
        let s = PartitioningSet::new(&self.inner, arc_ids).map_err(err)?;
        Ok(self.inner.is_valid_partitioning_set(&s))
    }

    fn __repr__(&self) -> String {
        format!(
            "WeightedDag(n={}, m={}, total_weight={})",
            self.inner.vertex_count(),
            self.inner.arc_count(),
            self.inner.total_weight()
        )
    }
}

#[pyclass(name = "Solution", module = "dagpart", frozen, get_all)]
pub struct PySolution {
    /// One of `"YES"`, `"NO"`, `"OPT"`, `"HEUR"`, `"TIMEOUT"`.
    status: String,
    weight: Option<Weight>,
    arc_ids: Vec<usize>,
    arcs: Vec<(usize, usize)>,
    nodes: u64,
}

#[pymethods]
impl PySolution {
    fn __repr__(&self) -> String {
        let weight = self.weight.map_or("None".to_string(), |w| w.to_string());
        format!(
            "Solution(status='{}', weight={weight}, arcs={}, nodes={})",
            self.status,
            self.arcs.len(),
            self.nodes
        )
    }
}

fn solution(g: &dagpart::WeightedDag, status: &str, set: Option<PartitioningSet>, nodes: u64) -> PySolution {
    PySolution {
        status: status.to_string(),
        weight: set.as_ref().map(PartitioningSet::total_weight),
        arc_ids: set.as_ref().map_or(Vec::new(), |s| s.arcs().to_vec()),
        arcs: set.as_ref().map_or(Vec::new(), |s| s.endpoints(g)),
        nodes,
    }
}

fn mode(name: &str) -> PyResult<ReductionMode> {
    match name {
        "none" => Ok(ReductionMode::NoReduction),
        "initial" => Ok(ReductionMode::InitialReduction),
        "interleaved" => Ok(ReductionMode::InterleavedReduction),
        other => Err(err(format!("unknown mode `{other}`; expected none, initial or interleaved"))),
    }
}

fn limits(timeout: Option<f64>, node_limit: Option<u64>) -> PyResult<Limits> {
    let mut l = match timeout {
        Some(t) => Limits::with_timeout(Duration::try_from_secs_f64(t).map_err(err)?),
        None => Limits::none(),
    };
    l.node_limit = node_limit;
    Ok(l)
}

/// Decides whether a partitioning set of weight at most `budget` exists.
#[pyfunction]
#[pyo3(signature = (g, budget, mode = "interleaved", timeout = None, node_limit = None))]
fn solve(
    py: Python<'_>,
    g: &PyDag,
    budget: Weight,
    mode: &str,
    timeout: Option<f64>,
    node_limit: Option<u64>,
) -> PyResult<PySolution> {
    let cfg = SearchConfig::new(self::mode(mode)?, budget).with_limits(limits(timeout, node_limit)?);
    let (d, stats) = py.detach(|| solve_decision(&g.inner, &cfg));
    Ok(match d {
        Decision::Yes { witness, .. } => solution(&g.inner, "YES", witness, stats.nodes_expanded),
        Decision::No => solution(&g.inner, "NO", None, stats.nodes_expanded),
        Decision::Exhausted(_) => solution(&g.inner, "TIMEOUT", None, stats.nodes_expanded),
    })
}

/// Minimum-weight partitioning set.
#[pyfunction]
#[pyo3(signature = (g, mode = "interleaved", timeout = None, node_limit = None))]
fn minimize(
    py: Python<'_>,
    g: &PyDag,
    mode: &str,
    timeout: Option<f64>,
    node_limit: Option<u64>,
) -> PyResult<PySolution> {
    let (m, l) = (self::mode(mode)?, limits(timeout, node_limit)?);
    let (res, stats) = py.detach(|| solve_minimize(&g.inner, m, l));
    Ok(match res {
        Ok(s) => solution(&g.inner, "OPT", Some(s), stats.nodes_expanded),
        Err(_) => solution(&g.inner, "TIMEOUT", None, stats.nodes_expanded),
    })
}

#[pyfunction]
fn heuristic(g: &PyDag) -> PySolution {
    solution(&g.inner, "HEUR", Some(dagpart::heuristic_partition(&g.inner)), 0)
}

/// Exhaustive minimum for instances with at most 22 arcs.
#[pyfunction]
fn brute_force(g: &PyDag) -> PyResult<PySolution> {
    let s = dagpart::brute_force_min(&g.inner).map_err(err)?;
    Ok(solution(&g.inner, "OPT", Some(s), 0))
}

#[pyfunction]
fn reduce(g: &PyDag) -> PyDag {
    PyDag {
        inner: dagpart::reduce(&g.inner).0,
    }
}

/// Optimum via the tree-decomposition DP. `bags` use 0-based vertex ids and
/// `edges` index into `bags`.
#[pyfunction]
#[pyo3(signature = (g, bags, edges, width_cap = DEFAULT_WIDTH_CAP))]
fn solve_treewidth(g: &PyDag, bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>, width_cap: usize) -> PyResult<Weight> {
    let td = TreeDecomposition::new(g.inner.vertex_count(), bags, edges);
    treewidth::solve_treewidth(&g.inner, &td, Weight::MAX, width_cap)
        .map(|s| s.optimum)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (sinks, vertices, outdegree, seed = DEFAULT_SEED))]
fn gen_pref_attach(sinks: usize, vertices: usize, outdegree: usize, seed: u64) -> PyResult<PyDag> {
    generators::gen_pref_attach(sinks, vertices, outdegree, seed)
        .map(|inner| PyDag { inner })
        .map_err(err)
}

/// Returns the graph and the ids of the embedded cross-component arcs.
#[pyfunction]
#[pyo3(signature = (components, vertices, outdegree, embedded, sinks = 1, seed = DEFAULT_SEED))]
fn gen_embedded(
    components: usize,
    vertices: usize,
    outdegree: usize,
    embedded: usize,
    sinks: usize,
    seed: u64,
) -> PyResult<(PyDag, Vec<usize>)> {
    let spec = GenSpec {
        components,
        vertices_per_component: vertices,
        outdegree,
        sinks_per_component: sinks,
        embedded,
        seed,
    };
    let (inner, set) = generators::gen_embedded(&spec).map_err(err)?;
    Ok((PyDag { inner }, set.arcs().to_vec()))
}

/// The 3-SAT gadget for a formula with DIMACS-style literals; returns the graph and its budget.
#[pyfunction]
fn from_3sat(variables: usize, clauses: Vec<Vec<i32>>) -> PyResult<(PyDag, Weight)> {
    let phi = CnfFormula::new(variables, clauses).map_err(err)?;
    let (inner, k) = generators::from_3sat(&phi).map_err(err)?;
    Ok((PyDag { inner }, k))
}

#[pyfunction]
fn unitize(g: &PyDag) -> PyResult<PyDag> {
    generators::unitize(&g.inner).map(|inner| PyDag { inner }).map_err(err)
}

#[pymodule]
#[pyo3(name = "dagpart")]
fn dagpart_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDag>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(heuristic, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(solve_treewidth, m)?)?;
    m.add_function(wrap_pyfunction!(gen_pref_attach, m)?)?;
    m.add_function(wrap_pyfunction!(gen_embedded, m)?)?;
    m.add_function(wrap_pyfunction!(from_3sat, m)?)?;
    m.add_function(wrap_pyfunction!(unitize, m)?)?;
    Ok(())
}
