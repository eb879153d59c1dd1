//! Search-tree decision solver running in `O(2^k (n + m))`, with optional data
//! reduction up front or at every search node, and a minimisation wrapper.
//!
//! The recursion is unrolled onto an explicit stack. Each stack entry is a
//! [`Level`]: an instance together with the branching points opened on it. The
//! first level holds the input (or its reduction); in interleaved mode a new
//! level is pushed after a branching step, holding the reduced residual
//! instance of the unprocessed vertices, and popped again once exhausted.

use std::borrow::Cow;
use std::time::{Duration, Instant};

use crate::graph::{PartitioningSet, WeightedDag, Weight};
use crate::reduction::{reduce, ArcOrigins};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionMode {
    NoReduction,
    InitialReduction,
    InterleavedReduction,
}

impl ReductionMode {
    pub const ALL: [ReductionMode; 3] = [
        ReductionMode::NoReduction,
        ReductionMode::InitialReduction,
        ReductionMode::InterleavedReduction,
    ];
}

/// Cooperative stopping conditions shared by every solver entry point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Limits {
    pub node_limit: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Limits {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn with_timeout(timeout: Duration) -> Self {
        Limits {
            node_limit: None,
            deadline: Some(Instant::now() + timeout),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub mode: ReductionMode,
    pub budget: Weight,
    pub limits: Limits,
    pub collect_witness: bool,
    /// In interleaved mode, re-reduce after every `interleave_stride`-th node.
    pub interleave_stride: u64,
}

impl SearchConfig {
    pub fn new(mode: ReductionMode, budget: Weight) -> Self {
        SearchConfig {
            mode,
            budget,
            limits: Limits::none(),
            collect_witness: true,
            interleave_stride: 1,
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }

    pub fn with_stride(mut self, stride: u64) -> Self {
        self.interleave_stride = stride.max(1);
        self
    }

    pub fn without_witness(mut self) -> Self {
        self.collect_witness = false;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub max_depth: u32,
    pub wall_time: Duration,
}

impl SearchStats {
    fn absorb(&mut self, other: &SearchStats) {
        self.nodes_expanded += other.nodes_expanded;
        self.max_depth = self.max_depth.max(other.max_depth);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exhaustion {
    NodeLimit,
    Deadline,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    /// A partitioning set of weight at most the budget exists. The witness is
    /// present when it was requested.
    Yes {
        weight: Weight,
        witness: Option<PartitioningSet>,
    },
    No,
    Exhausted(Exhaustion),
}

impl Decision {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::Yes { .. })
    }
}

struct Branch {
    pos: usize,
    sinks: Vec<u32>,
    next: usize,
    chosen_len: usize,
    weight: Weight,
}

enum Step {
    Done,
    Branch(Vec<u32>),
}

struct Level<'g> {
    g: Cow<'g, WeightedDag>,
    /// Arcs of `g` mapped to arcs of the level below, or of the input for the first level.
    origin: Option<ArcOrigins>,
    position: Vec<u32>,
    label: Vec<u32>,
    pos: usize,
    chosen: Vec<u32>,
    weight: Weight,
    budget: Weight,
    branches: Vec<Branch>,
}

impl<'g> Level<'g> {
    fn new(g: Cow<'g, WeightedDag>, origin: Option<ArcOrigins>, budget: Weight) -> Self {
        let n = g.vertex_count();
        let mut position = vec![0u32; n];
        for (i, &v) in g.rev_topo_raw().iter().enumerate() {
            position[v as usize] = i as u32;
        }
        Level {
            g,
            origin,
            position,
            label: vec![NONE; n],
            pos: 0,
            chosen: Vec::new(),
            weight: 0,
            budget,
            branches: Vec::new(),
        }
    }

    /// Labels vertices that need no decision; stops at the first that does.
    fn advance(&mut self) -> Step {
        let g: &WeightedDag = &self.g;
        let order = g.rev_topo_raw();
        let heads = g.heads_raw();
        while self.pos < order.len() {
            let v = order[self.pos] as usize;
            let out = g.out_slice(v);
            let Some((&first, _)) = out.split_first() else {
                self.label[v] = v as u32;
                self.pos += 1;
                continue;
            };
            let l = self.label[heads[first as usize] as usize];
            if out.iter().all(|&a| self.label[heads[a as usize] as usize] == l) {
                self.label[v] = l;
                self.pos += 1;
                continue;
            }
            let mut sinks: Vec<u32> = out.iter().map(|&a| self.label[heads[a as usize] as usize]).collect();
            sinks.sort_unstable();
            sinks.dedup();
            return Step::Branch(sinks);
        }
        Step::Done
    }

    /// Takes the next sink of the innermost branching point. Returns false if
    /// that choice exceeds the budget.
    fn choose_next(&mut self) -> bool {
        let b = self.branches.last_mut().expect("open branching point");
        let s = b.sinks[b.next];
        b.next += 1;
        self.chosen.truncate(b.chosen_len);
        self.weight = b.weight;
        let v = self.g.rev_topo_raw()[b.pos] as usize;
        self.pos = b.pos + 1;
        self.label[v] = s;
        let heads = self.g.heads_raw();
        for &a in self.g.out_slice(v) {
            if self.label[heads[a as usize] as usize] != s {
                self.chosen.push(a);
                self.weight += self.g.weight(a as usize);
            }
        }
        self.weight <= self.budget
    }

    /// The instance left to solve: unprocessed vertices, plus the sinks that
    /// processed out-neighbours are labelled with. An arc into a processed
    /// vertex is redirected to that vertex's label; parallel arcs merge.
    fn residual(&self) -> (WeightedDag, ArcOrigins) {
        let g: &WeightedDag = &self.g;
        let n = g.vertex_count();
        let heads = g.heads_raw();
        let processed = |v: usize| (self.position[v] as usize) < self.pos;
        let target = |w: usize| if processed(w) { self.label[w] as usize } else { w };
        let mut id = vec![NONE; n];
        for u in (0..n).filter(|&u| !processed(u)) {
            id[u] = 0;
            for &a in g.out_slice(u) {
                id[target(heads[a as usize] as usize)] = 0;
            }
        }
        let mut next = 0u32;
        for x in id.iter_mut().filter(|x| **x == 0) {
            *x = next;
            next += 1;
        }
        let mut tail = Vec::new();
        let mut head = Vec::new();
        let mut weight: Vec<Weight> = Vec::new();
        let mut slot = vec![NONE; next as usize];
        let mut groups: Vec<Vec<u32>> = Vec::new();
        let mut origins = ArcOrigins::with_capacity(g.arc_count());
        for u in (0..n).filter(|&u| !processed(u)) {
            let first = tail.len();
            for &a in g.out_slice(u) {
                let t = id[target(heads[a as usize] as usize)] as usize;
                if slot[t] == NONE || (slot[t] as usize) < first {
                    slot[t] = tail.len() as u32;
                    tail.push(id[u]);
                    head.push(t as u32);
                    weight.push(0);
                    groups.push(Vec::new());
                }
                let i = slot[t] as usize;
                weight[i] += g.weight(a as usize);
                groups[i].push(a);
            }
        }
        for group in groups {
            origins.push(group);
        }
        (WeightedDag::from_trusted(next as usize, tail, head, weight), origins)
    }

    fn child(&self) -> Level<'static> {
        let (h, contraction) = self.residual();
        let (r, log) = reduce(&h);
        let origin = log.arc_origins().compose(&contraction);
        Level::new(Cow::Owned(r), Some(origin), self.budget - self.weight)
    }
}

fn check_limits(limits: &Limits, nodes: u64) -> Option<Exhaustion> {
    if limits.node_limit.is_some_and(|l| nodes > l) {
        return Some(Exhaustion::NodeLimit);
    }
    if limits.deadline.is_some_and(|d| Instant::now() >= d) {
        return Some(Exhaustion::Deadline);
    }
    None
}

/// Decides whether `g` has a partitioning set of weight at most `cfg.budget`.
pub fn solve_decision(g: &WeightedDag, cfg: &SearchConfig) -> (Decision, SearchStats) {
    let start = Instant::now();
    let mut stats = SearchStats {
        nodes_expanded: 1,
        ..SearchStats::default()
    };
    let decision = run(g, cfg, &mut stats);
    stats.wall_time = start.elapsed();
    (decision, stats)
}

fn run(g: &WeightedDag, cfg: &SearchConfig, stats: &mut SearchStats) -> Decision {
    if let Some(e) = check_limits(&cfg.limits, stats.nodes_expanded) {
        return Decision::Exhausted(e);
    }
    let root = match cfg.mode {
        ReductionMode::NoReduction => Level::new(Cow::Borrowed(g), None, cfg.budget),
        _ => {
            let (r, log) = reduce(g);
            Level::new(Cow::Owned(r), Some(log.arc_origins().clone()), cfg.budget)
        }
    };
    let interleave = cfg.mode == ReductionMode::InterleavedReduction;
    let stride = cfg.interleave_stride.max(1);
    let mut levels: Vec<Level> = vec![root];
    let mut depth = 0u32;
    loop {
        let top = levels.last_mut().expect("non-empty level stack");
        match top.advance() {
            Step::Done => return finish(g, &levels, cfg.collect_witness),
            Step::Branch(sinks) => {
                if (sinks.len() as Weight - 1) <= top.budget - top.weight {
                    top.branches.push(Branch {
                        pos: top.pos,
                        sinks,
                        next: 0,
                        chosen_len: top.chosen.len(),
                        weight: top.weight,
                    });
                    depth += 1;
                }
            }
        }
        loop {
            let Some(top) = levels.last_mut() else {
                return Decision::No;
            };
            let Some(b) = top.branches.last() else {
                levels.pop();
                continue;
            };
            if b.next == b.sinks.len() {
                top.branches.pop();
                depth -= 1;
                continue;
            }
            if !top.choose_next() {
                continue;
            }
            stats.nodes_expanded += 1;
            stats.max_depth = stats.max_depth.max(depth);
            if let Some(e) = check_limits(&cfg.limits, stats.nodes_expanded) {
                return Decision::Exhausted(e);
            }
            if interleave && stats.nodes_expanded.is_multiple_of(stride) {
                let child = top.child();
                levels.push(child);
            }
            break;
        }
    }
}

fn finish(g: &WeightedDag, levels: &[Level], collect: bool) -> Decision {
    let weight = levels.iter().map(|l| l.weight).sum();
    if !collect {
        return Decision::Yes { weight, witness: None };
    }
    let mut acc: Vec<u32> = Vec::new();
    for level in levels.iter().rev() {
        acc.extend_from_slice(&level.chosen);
        if let Some(origin) = &level.origin {
            acc = acc.iter().flat_map(|&a| origin.get(a as usize).iter().copied()).collect();
        }
    }
    let witness = PartitioningSet::new(g, acc.into_iter().map(|a| a as usize)).expect("lifted arcs exist in the input");
    debug_assert_eq!(witness.total_weight(), weight);
    Decision::Yes {
        weight,
        witness: Some(witness),
    }
}

/// Outcome of [`solve_minimize`]: an optimal set, or the reason the search stopped.
pub type MinimizeResult = Result<PartitioningSet, Exhaustion>;

/// Minimum-weight partitioning set by exponential then binary search on the budget.
pub fn solve_minimize(g: &WeightedDag, mode: ReductionMode, limits: Limits) -> (MinimizeResult, SearchStats) {
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let probe = |k: Weight, stats: &mut SearchStats| -> Result<Option<PartitioningSet>, Exhaustion> {
        let remaining = Limits {
            node_limit: limits.node_limit.map(|l| l.saturating_sub(stats.nodes_expanded)),
            deadline: limits.deadline,
        };
        if remaining.node_limit == Some(0) {
            return Err(Exhaustion::NodeLimit);
        }
        let cfg = SearchConfig::new(mode, k).with_limits(remaining);
        let (decision, s) = solve_decision(g, &cfg);
        stats.absorb(&s);
        match decision {
            Decision::Yes { witness, .. } => Ok(witness),
            Decision::No => Ok(None),
            Decision::Exhausted(e) => Err(e),
        }
    };
    let result = (|| {
        let cap = g.total_weight();
        let mut lo: Weight = 0;
        let mut hi = 0;
        let mut best = loop {
            if let Some(w) = probe(hi, &mut stats)? {
                break w;
            }
            lo = hi + 1;
            hi = if hi == 0 { 1 } else { (hi * 2).min(cap) };
        };
        hi = best.total_weight();
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            match probe(mid, &mut stats)? {
                Some(w) => {
                    hi = w.total_weight();
                    best = w;
                }
                None => lo = mid + 1,
            }
        }
        Ok(best)
    })();
    stats.wall_time = start.elapsed();
    (result, stats)
}
