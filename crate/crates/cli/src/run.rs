use std::fmt;
use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use clap::ValueEnum;
use dagpart::exact::{solve_decision, solve_minimize, Decision, Limits, ReductionMode, SearchConfig};
use dagpart::treewidth::{solve_treewidth, TreeDecomposition, DEFAULT_WIDTH_CAP};
use dagpart::{brute_force_min, heuristic_partition, PartitioningSet, WeightedDag, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Exact,
    ExactDr,
    ExactInterleaved,
    Heuristic,
    Treewidth,
    Brute,
}

impl Algo {
    fn mode(self) -> Option<ReductionMode> {
        match self {
            Algo::Exact => Some(ReductionMode::NoReduction),
            Algo::ExactDr => Some(ReductionMode::InitialReduction),
            Algo::ExactInterleaved => Some(ReductionMode::InterleavedReduction),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algo::Exact => "exact",
            Algo::ExactDr => "exact-dr",
            Algo::ExactInterleaved => "exact-interleaved",
            Algo::Heuristic => "heuristic",
            Algo::Treewidth => "treewidth",
            Algo::Brute => "brute",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// A set within the budget exists.
    Yes,
    /// No set within the budget exists.
    No,
    /// Proven minimum.
    Optimal,
    /// Heuristic upper bound.
    Heuristic,
    Timeout,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Yes => "YES",
            Status::No => "NO",
            Status::Optimal => "OPT",
            Status::Heuristic => "HEUR",
            Status::Timeout => "TIMEOUT",
        }
    }

    pub fn exit_code(self, weight: Option<Weight>, budget: Option<Weight>) -> i32 {
        match self {
            Status::No => 1,
            Status::Timeout => 2,
            _ if weight.zip(budget).is_some_and(|(w, k)| w > k) => 1,
            _ => 0,
        }
    }
}

pub struct Request<'a> {
    pub algo: Algo,
    pub budget: Option<Weight>,
    pub minimize: bool,
    pub td: Option<&'a TreeDecomposition>,
    pub timeout: Option<Duration>,
}

pub struct Outcome {
    pub status: Status,
    pub set: Option<PartitioningSet>,
    pub nodes: u64,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn weight(&self) -> Option<Weight> {
        self.set.as_ref().map(PartitioningSet::total_weight)
    }
}

fn limits(timeout: Option<Duration>) -> Limits {
    timeout.map_or(Limits::none(), Limits::with_timeout)
}

pub fn run(g: &WeightedDag, req: &Request) -> Result<Outcome> {
    let start = Instant::now();
    let finish = |status, set, nodes| Outcome {
        status,
        set,
        nodes,
        elapsed: start.elapsed(),
    };
    if let Some(mode) = req.algo.mode() {
        if req.minimize {
            let (res, stats) = solve_minimize(g, mode, limits(req.timeout));
            return Ok(match res {
                Ok(s) => finish(Status::Optimal, Some(s), stats.nodes_expanded),
                Err(_) => finish(Status::Timeout, None, stats.nodes_expanded),
            });
        }
        let Some(k) = req.budget else {
            bail!("--budget is required unless --minimize is given");
        };
        let cfg = SearchConfig::new(mode, k).with_limits(limits(req.timeout));
        let (d, stats) = solve_decision(g, &cfg);
        return Ok(match d {
            Decision::Yes { witness, .. } => finish(Status::Yes, witness, stats.nodes_expanded),
            Decision::No => finish(Status::No, None, stats.nodes_expanded),
            Decision::Exhausted(_) => finish(Status::Timeout, None, stats.nodes_expanded),
        });
    }
    let optimum = match req.algo {
        Algo::Heuristic => return Ok(finish(Status::Heuristic, Some(heuristic_partition(g)), 0)),
        Algo::Brute => brute_force_min(g)?,
        Algo::Treewidth => {
            let Some(td) = req.td else {
                bail!("--td is required for the treewidth algorithm");
            };
            let sol = solve_treewidth(g, td, req.budget.unwrap_or(Weight::MAX), DEFAULT_WIDTH_CAP)?;
            let cfg = SearchConfig::new(ReductionMode::InitialReduction, sol.optimum).with_limits(limits(req.timeout));
            match solve_decision(g, &cfg).0 {
                Decision::Yes { witness: Some(s), .. } => s,
                Decision::Exhausted(_) => return Ok(finish(Status::Timeout, None, 0)),
                other => bail!("search disagrees with the treewidth optimum {}: {other:?}", sol.optimum),
            }
        }
        _ => unreachable!("search algorithms handled above"),
    };
    Ok(match req.budget.filter(|_| !req.minimize) {
        Some(k) if optimum.total_weight() > k => finish(Status::No, None, 0),
        Some(_) => finish(Status::Yes, Some(optimum), 0),
        None => finish(Status::Optimal, Some(optimum), 0),
    })
}
