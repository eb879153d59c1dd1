//! Seeded instance generators.
//!
//! All randomness comes from [`ChaCha8Rng`] seeded with a 64-bit value, so a
//! generator call is a pure function of its arguments.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{PartitioningSet, Vertex, WeightedDag, Weight};
use crate::treewidth::TreeDecomposition;

pub const DEFAULT_SEED: u64 = 0x00da_6da6;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A CNF formula over variables `1..=n`; literal `-i` is the negation of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    n: usize,
    clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(n: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for (j, c) in clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::InvalidArgument(format!("clause {} is empty", j + 1)));
            }
            if let Some(&l) = c.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > n) {
                return Err(Error::InvalidArgument(format!("clause {} has literal {l} outside 1..={n}", j + 1)));
            }
        }
        Ok(CnfFormula { n, clauses })
    }

    pub fn variable_count(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// `assignment` bit `i` is the value of variable `i + 1`.
    pub fn satisfied_by(&self, assignment: u64) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let value = assignment >> (l.unsigned_abs() - 1) & 1 == 1;
                value == (l > 0)
            })
        })
    }
}

/// Uniform random formula with `m` clauses of 1 to 3 literals over `n` variables.
pub fn random_3cnf(n: usize, m: usize, seed: u64) -> CnfFormula {
    let mut rng = rng(seed);
    let clauses = (0..m)
        .map(|_| {
            let len = rng.random_range(1..=3usize.min(n));
            let mut vars: Vec<i32> = (1..=n as i32).collect();
            vars.shuffle(&mut rng);
            vars.truncate(len);
            vars.into_iter().map(|v| if rng.random_bool(0.5) { v } else { -v }).collect()
        })
        .collect();
    CnfFormula { n, clauses }
}

/// One preferential-attachment component in local ids. Each vertex holds one
/// ticket plus one per in-arc, so a uniform ticket draw is proportional to indegree + 1.
struct Attachment {
    tickets: Vec<u32>,
    size: u32,
}

impl Attachment {
    fn new(seeds: usize) -> Self {
        Attachment {
            tickets: (0..seeds as u32).collect(),
            size: seeds as u32,
        }
    }

    /// Adds a vertex with up to `d` targets drawn with probability proportional
    /// to indegree + 1; returns the distinct local targets in draw order.
    fn grow(&mut self, d: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
        let mut targets: Vec<u32> = Vec::with_capacity(d);
        for _ in 0..d {
            let t = self.tickets[rng.random_range(0..self.tickets.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        self.tickets.extend_from_slice(&targets);
        self.tickets.push(self.size);
        self.size += 1;
        targets
    }
}

/// Citation-style DAG: `c` sinks, then `n` vertices each citing up to `d` older ones.
pub fn gen_pref_attach(c: usize, n: usize, d: usize, seed: u64) -> Result<WeightedDag> {
    if c == 0 || d == 0 {
        return Err(Error::InvalidArgument("sink count and outdegree must be at least 1".into()));
    }
    let mut rng = rng(seed);
    let mut pa = Attachment::new(c);
    let mut arcs = Vec::with_capacity(n * d);
    for i in 0..n {
        let v = c + i;
        arcs.extend(pa.grow(d, &mut rng).into_iter().map(|t| (v, t as usize, 1)));
    }
    WeightedDag::new(c + n, arcs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub components: usize,
    pub vertices_per_component: usize,
    pub outdegree: usize,
    pub sinks_per_component: usize,
    pub embedded: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.components == 0 || self.outdegree == 0 || self.sinks_per_component == 0 {
            return Err(Error::InvalidArgument(
                "components, outdegree and sinks per component must be at least 1".into(),
            ));
        }
        if self.embedded > 0 && self.components < 2 {
            return Err(Error::InvalidArgument("embedded arcs need at least two components".into()));
        }
        Ok(())
    }
}

/// Independent preferential-attachment components grown in lockstep, plus
/// `embedded` random arcs between components, each pointing from the newer
/// vertex to the older one. Returns the graph and the embedded arcs.
///
/// Component `c` owns the ids `i * components + c`, so ids double as a global
/// creation counter and every arc points to a smaller id.
pub fn gen_embedded(spec: &GenSpec) -> Result<(WeightedDag, PartitioningSet)> {
    spec.validate()?;
    let comps = spec.components;
    let per = spec.sinks_per_component + spec.vertices_per_component;
    let n = comps
        .checked_mul(per)
        .filter(|&n| n < u32::MAX as usize)
        .ok_or_else(|| Error::TooLarge("generated vertex count".into()))?;
    let pairs_available: u128 = {
        let p = per as u128;
        let c = comps as u128;
        p * p * c * (c - 1) / 2
    };
    if spec.embedded as u128 > pairs_available {
        return Err(Error::InvalidArgument(format!(
            "{} embedded arcs requested but only {pairs_available} cross-component pairs exist",
            spec.embedded
        )));
    }
    let mut rng = rng(spec.seed);
    let global = |local: usize, comp: usize| local * comps + comp;
    let mut growers: Vec<Attachment> = (0..comps).map(|_| Attachment::new(spec.sinks_per_component)).collect();
    let mut arcs: Vec<(Vertex, Vertex, Weight)> = Vec::with_capacity(n * spec.outdegree + spec.embedded);
    for local in spec.sinks_per_component..per {
        for (comp, pa) in growers.iter_mut().enumerate() {
            let v = global(local, comp);
            arcs.extend(pa.grow(spec.outdegree, &mut rng).into_iter().map(|t| (v, global(t as usize, comp), 1)));
        }
    }
    let first_cross = arcs.len();
    let mut chosen: HashSet<(Vertex, Vertex)> = HashSet::with_capacity(spec.embedded);
    if (spec.embedded as u128) * 2 <= pairs_available {
        while chosen.len() < spec.embedded {
            let x = rng.random_range(0..n);
            let y = rng.random_range(0..n);
            if x % comps == y % comps {
                continue;
            }
            let pair = (x.max(y), x.min(y));
            if chosen.insert(pair) {
                arcs.push((pair.0, pair.1, 1));
            }
        }
    } else {
        let mut all: Vec<(Vertex, Vertex)> = (0..n)
            .flat_map(|u| (0..u).filter(move |&v| u % comps != v % comps).map(move |v| (u, v)))
            .collect();
        all.shuffle(&mut rng);
        arcs.extend(all.into_iter().take(spec.embedded).map(|(u, v)| (u, v, 1)));
    }
    let g = WeightedDag::new(n, arcs)?;
    let embedded = PartitioningSet::new(&g, first_cross..g.arc_count())?;
    Ok((g, embedded))
}

/// Vertex ids of the 3-SAT gadget: `f, f', t, t'` are `0..4`; variable `i`
/// (0-based) owns `4 + 4i ..= 7 + 4i` as `x^t, x^f, x, not x`; clause `j`
/// is `4 + 4n + j`.
pub fn from_3sat(phi: &CnfFormula) -> Result<(WeightedDag, Weight)> {
    let n = phi.variable_count();
    let m = phi.clauses().len();
    if phi.clauses().iter().any(|c| c.len() > 3) {
        return Err(Error::InvalidArgument("clauses may have at most three literals".into()));
    }
    let k = (4 * n + 2 * m) as Weight;
    let heavy = k + 1;
    let (f, f_, t, t_) = (0, 1, 2, 3);
    let lit = |l: i32| 4 + 4 * (l.unsigned_abs() as usize - 1) + if l > 0 { 2 } else { 3 };
    let mut arcs = vec![(f, f_, heavy), (t, t_, heavy)];
    for i in 0..n {
        let (xt, xf, x, nx) = (4 + 4 * i, 5 + 4 * i, 6 + 4 * i, 7 + 4 * i);
        arcs.extend([(t, xt, heavy), (f, xf, heavy)]);
        for (u, v) in [(xt, x), (xt, nx), (xf, x), (xf, nx), (x, f_), (nx, f_), (x, t_), (nx, t_)] {
            arcs.push((u, v, 1));
        }
    }
    for (j, clause) in phi.clauses().iter().enumerate() {
        let c = 4 + 4 * n + j;
        arcs.push((t, c, heavy));
        let mut targets: Vec<usize> = clause.iter().map(|&l| lit(l)).collect();
        targets.sort_unstable();
        targets.dedup();
        arcs.extend(targets.into_iter().map(|v| (c, v, 1)));
    }
    Ok((WeightedDag::new(4 + 4 * n + m, arcs)?, k))
}

/// Replaces each arc of weight `w > 1` by a unit arc plus `w - 1` unit paths of length two.
pub fn unitize(g: &WeightedDag) -> Result<WeightedDag> {
    let extra: u64 = g.arcs().map(|(_, _, w)| w - 1).sum();
    let n = (g.vertex_count() as u64)
        .checked_add(extra)
        .filter(|&n| n < u32::MAX as u64 / 2)
        .ok_or_else(|| Error::TooLarge(format!("unitized graph needs {extra} extra vertices")))? as usize;
    let mut arcs = Vec::with_capacity(g.arc_count() + 2 * extra as usize);
    let mut next = g.vertex_count();
    for (u, v, w) in g.arcs() {
        arcs.push((u, v, 1));
        for _ in 1..w {
            arcs.extend([(u, next, 1), (next, v, 1)]);
            next += 1;
        }
    }
    WeightedDag::new(n, arcs)
}

/// Random DAG on `n` vertices with `m` distinct arcs oriented along a random
/// permutation and weights drawn from `1..=max_weight`.
pub fn random_dag(n: usize, m: usize, max_weight: Weight, seed: u64) -> Result<WeightedDag> {
    let possible = n * n.saturating_sub(1) / 2;
    if m > possible || max_weight == 0 {
        return Err(Error::InvalidArgument(format!("cannot place {m} arcs on {n} vertices")));
    }
    let mut rng = rng(seed);
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(&mut rng);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    pairs.shuffle(&mut rng);
    let arcs = pairs.into_iter().take(m).map(|(i, j)| {
        let (u, v) = if rank[i] > rank[j] { (i, j) } else { (j, i) };
        (u, v, rng.random_range(1..=max_weight))
    });
    let arcs: Vec<_> = arcs.collect();
    WeightedDag::new(n, arcs)
}

/// Random DAG whose underlying undirected graph is a tree on `n` vertices.
pub fn random_tree_dag(n: usize, max_weight: Weight, seed: u64) -> Result<WeightedDag> {
    if max_weight == 0 {
        return Err(Error::InvalidArgument("max weight must be at least 1".into()));
    }
    let mut rng = rng(seed);
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(&mut rng);
    let arcs: Vec<_> = (1..n)
        .map(|v| {
            let p = rng.random_range(0..v);
            let (u, w) = if rank[v] > rank[p] { (v, p) } else { (p, v) };
            (u, w, rng.random_range(1..=max_weight))
        })
        .collect();
    WeightedDag::new(n, arcs)
}

/// Random DAG together with a tree decomposition of width at most `width`.
///
/// Bags are grown one vertex at a time: each new vertex picks an existing bag,
/// keeps a random subset of at most `width` of its vertices, and may receive an
/// arc to or from each of them with probability `arc_prob`.
pub fn gen_bounded_treewidth(
    n: usize,
    width: usize,
    arc_prob: f64,
    max_weight: Weight,
    seed: u64,
) -> Result<(WeightedDag, TreeDecomposition)> {
    if max_weight == 0 || !(0.0..=1.0).contains(&arc_prob) {
        return Err(Error::InvalidArgument("bad weight or arc probability".into()));
    }
    let mut rng = rng(seed);
    let mut rank: Vec<usize> = (0..n).collect();
    rank.shuffle(&mut rng);
    let mut bags: Vec<Vec<usize>> = Vec::new();
    let mut edges = Vec::new();
    let mut arcs = Vec::new();
    for v in 0..n {
        let parent = (!bags.is_empty()).then(|| rng.random_range(0..bags.len()));
        let mut bag: Vec<usize> = match parent {
            Some(p) => {
                let mut b = bags[p].clone();
                b.shuffle(&mut rng);
                let keep = rng.random_range(0..=width.min(b.len()));
                b.truncate(keep);
                b
            }
            None => Vec::new(),
        };
        for &u in &bag {
            if rng.random_bool(arc_prob) {
                let (x, y) = if rank[u] > rank[v] { (u, v) } else { (v, u) };
                arcs.push((x, y, rng.random_range(1..=max_weight)));
            }
        }
        bag.push(v);
        bag.sort_unstable();
        if let Some(p) = parent {
            edges.push((p, bags.len()));
        }
        bags.push(bag);
    }
    if bags.is_empty() {
        bags.push(Vec::new());
    }
    Ok((WeightedDag::new(n, arcs)?, TreeDecomposition::new(n, bags, edges)))
}
