//! Weighted DAGs, partitioning sets and the structural validators.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type ArcId = usize;
pub type Weight = u64;

/// A simple directed acyclic graph with positive integer arc weights.
///
/// Vertices are `0..n`, arcs are `0..m` in input order. Acyclicity, simplicity
/// and positive weights are checked on construction and never change afterwards.
#[derive(Clone, Debug)]
pub struct WeightedDag {
    n: usize,
    tail: Vec<u32>,
    head: Vec<u32>,
    weight: Vec<Weight>,
    out_start: Vec<u32>,
    out_arcs: Vec<u32>,
    in_start: Vec<u32>,
    in_arcs: Vec<u32>,
    rev_topo: Vec<u32>,
    total_weight: Weight,
}

impl WeightedDag {
    pub fn new<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex, Weight)>,
    {
        if n >= u32::MAX as usize {
            return Err(Error::TooLarge(format!("{n} vertices")));
        }
        let mut tail = Vec::new();
        let mut head = Vec::new();
        let mut weight = Vec::new();
        let mut total: Weight = 0;
        for (u, v, w) in arcs {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if w == 0 {
                return Err(Error::ZeroWeight(u, v));
            }
            total = total.checked_add(w).ok_or(Error::WeightOverflow)?;
            tail.push(u as u32);
            head.push(v as u32);
            weight.push(w);
        }
        if tail.len() >= u32::MAX as usize {
            return Err(Error::TooLarge(format!("{} arcs", tail.len())));
        }
        let g = Self::build(n, tail, head, weight, total)?;
        for v in 0..n {
            let out = g.out_slice(v);
            if let Some(pair) = out.windows(2).find(|p| g.head[p[0] as usize] == g.head[p[1] as usize]) {
                let a = pair[0] as usize;
                return Err(Error::DuplicateArc(g.tail(a), g.head(a)));
            }
        }
        Ok(g)
    }

    /// Builds from arrays already known to be simple, loop-free and positively weighted.
    pub(crate) fn from_trusted(n: usize, tail: Vec<u32>, head: Vec<u32>, weight: Vec<Weight>) -> Self {
        let total = weight.iter().sum();
        let g = Self::build(n, tail, head, weight, total).expect("trusted arc list must be acyclic");
        debug_assert!((0..n).all(|v| g
            .out_slice(v)
            .windows(2)
            .all(|p| g.head[p[0] as usize] != g.head[p[1] as usize])));
        g
    }

    fn build(n: usize, tail: Vec<u32>, head: Vec<u32>, weight: Vec<Weight>, total_weight: Weight) -> Result<Self> {
        let (out_start, mut out_arcs) = bucket(n, &tail);
        let (in_start, in_arcs) = bucket(n, &head);
        for v in 0..n {
            let lo = out_start[v] as usize;
            let hi = out_start[v + 1] as usize;
            out_arcs[lo..hi].sort_unstable_by_key(|&a| head[a as usize]);
        }
        let mut g = WeightedDag {
            n,
            tail,
            head,
            weight,
            out_start,
            out_arcs,
            in_start,
            in_arcs,
            rev_topo: Vec::new(),
            total_weight,
        };
        g.rev_topo = g.kahn().ok_or(Error::NotADag)?;
        Ok(g)
    }

    /// Kahn's method on the reversed graph, always taking the smallest available id.
    fn kahn(&self) -> Option<Vec<u32>> {
        let mut remaining: Vec<u32> = (0..self.n).map(|v| self.out_degree(v) as u32).collect();
        let mut heap: BinaryHeap<Reverse<u32>> =
            (0..self.n as u32).filter(|&v| remaining[v as usize] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(Reverse(v)) = heap.pop() {
            order.push(v);
            for &a in self.in_slice(v as usize) {
                let u = self.tail[a as usize] as usize;
                remaining[u] -= 1;
                if remaining[u] == 0 {
                    heap.push(Reverse(u as u32));
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.tail.len()
    }

    pub fn total_weight(&self) -> Weight {
        self.total_weight
    }

    pub fn tail(&self, a: ArcId) -> Vertex {
        self.tail[a] as usize
    }

    pub fn head(&self, a: ArcId) -> Vertex {
        self.head[a] as usize
    }

    pub fn weight(&self, a: ArcId) -> Weight {
        self.weight[a]
    }

    pub fn arc(&self, a: ArcId) -> (Vertex, Vertex, Weight) {
        (self.tail(a), self.head(a), self.weight[a])
    }

    pub fn arcs(&self) -> impl ExactSizeIterator<Item = (Vertex, Vertex, Weight)> + '_ {
        (0..self.arc_count()).map(|a| self.arc(a))
    }

    pub(crate) fn out_slice(&self, v: Vertex) -> &[u32] {
        &self.out_arcs[self.out_start[v] as usize..self.out_start[v + 1] as usize]
    }

    pub(crate) fn in_slice(&self, v: Vertex) -> &[u32] {
        &self.in_arcs[self.in_start[v] as usize..self.in_start[v + 1] as usize]
    }

    pub(crate) fn heads_raw(&self) -> &[u32] {
        &self.head
    }

    pub(crate) fn rev_topo_raw(&self) -> &[u32] {
        &self.rev_topo
    }

    /// Out-arcs of `v`, sorted by head.
    pub fn out_arcs(&self, v: Vertex) -> impl ExactSizeIterator<Item = ArcId> + '_ {
        self.out_slice(v).iter().map(|&a| a as usize)
    }

    /// In-arcs of `v`, sorted by tail.
    pub fn in_arcs(&self, v: Vertex) -> impl ExactSizeIterator<Item = ArcId> + '_ {
        self.in_slice(v).iter().map(|&a| a as usize)
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        (self.out_start[v + 1] - self.out_start[v]) as usize
    }

    pub fn in_degree(&self, v: Vertex) -> usize {
        (self.in_start[v + 1] - self.in_start[v]) as usize
    }

    pub fn is_sink(&self, v: Vertex) -> bool {
        self.out_degree(v) == 0
    }

    pub fn find_arc(&self, u: Vertex, v: Vertex) -> Option<ArcId> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let out = self.out_slice(u);
        out.binary_search_by_key(&(v as u32), |&a| self.head[a as usize])
            .ok()
            .map(|i| out[i] as usize)
    }

    /// Every arc `(u, v)` has `v` before `u`; ties go to the smallest vertex id.
    pub fn reverse_topological_order(&self) -> Vec<Vertex> {
        self.rev_topo.iter().map(|&v| v as usize).collect()
    }

    pub fn sinks(&self) -> Vec<Vertex> {
        (0..self.n).filter(|&v| self.is_sink(v)).collect()
    }

    pub fn deletion_mask(&self, deleted: &[ArcId]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.arc_count()];
        for &a in deleted {
            *mask.get_mut(a).ok_or(Error::UnknownArc(a))? = true;
        }
        Ok(mask)
    }

    /// Weak components of `g \ deleted`, each sorted, ordered by smallest member.
    pub fn weak_components(&self, deleted: &[ArcId]) -> Result<Vec<Vec<Vertex>>> {
        let mask = self.deletion_mask(deleted)?;
        let mut dsu = Dsu::new(self.n);
        for a in (0..self.arc_count()).filter(|&a| !mask[a]) {
            dsu.union(self.tail(a), self.head(a));
        }
        let mut index = vec![usize::MAX; self.n];
        let mut parts: Vec<Vec<Vertex>> = Vec::new();
        for v in 0..self.n {
            let r = dsu.find(v);
            if index[r] == usize::MAX {
                index[r] = parts.len();
                parts.push(Vec::new());
            }
            parts[index[r]].push(v);
        }
        Ok(parts)
    }

    /// Every weak component of `g \ s` has exactly one sink of `g \ s`.
    pub fn is_valid_partitioning_set(&self, s: &PartitioningSet) -> bool {
        let Ok(mask) = self.deletion_mask(s.arcs()) else {
            return false;
        };
        self.valid_under_mask(&mask)
    }

    pub(crate) fn valid_under_mask(&self, deleted: &[bool]) -> bool {
        let mut dsu = Dsu::new(self.n);
        let mut sink = vec![true; self.n];
        for a in (0..self.arc_count()).filter(|&a| !deleted[a]) {
            sink[self.tail(a)] = false;
            dsu.union(self.tail(a), self.head(a));
        }
        let mut count = vec![0u8; self.n];
        for v in (0..self.n).filter(|&v| sink[v]) {
            let r = dsu.find(v);
            if count[r] == 1 {
                return false;
            }
            count[r] = 1;
        }
        (0..self.n).all(|v| count[dsu.find(v)] == 1)
    }

    /// Every vertex of `g \ s` reaches exactly one sink along directed paths.
    pub fn reaches_exactly_one_sink(&self, s: &PartitioningSet) -> bool {
        const NONE: u32 = u32::MAX;
        const MANY: u32 = u32::MAX - 1;
        let Ok(mask) = self.deletion_mask(s.arcs()) else {
            return false;
        };
        let mut label = vec![NONE; self.n];
        for &v in &self.rev_topo {
            let v = v as usize;
            let mut l = NONE;
            for a in self.out_arcs(v).filter(|&a| !mask[a]) {
                let h = label[self.head(a)];
                l = if l == NONE || l == h { h } else { MANY };
            }
            if l == MANY {
                return false;
            }
            label[v] = if l == NONE { v as u32 } else { l };
        }
        true
    }

    /// Greedily restores arcs of `s` in ascending id order while validity holds,
    /// repeating until no single arc can be restored.
    pub fn minimalize(&self, s: &PartitioningSet) -> Result<PartitioningSet> {
        let mut mask = self.deletion_mask(s.arcs())?;
        if !self.valid_under_mask(&mask) {
            return Err(Error::NotPartitioning);
        }
        let mut kept: Vec<ArcId> = s.arcs().to_vec();
        loop {
            let mut changed = false;
            let mut next = Vec::with_capacity(kept.len());
            for &a in &kept {
                mask[a] = false;
                if self.valid_under_mask(&mask) {
                    changed = true;
                } else {
                    mask[a] = true;
                    next.push(a);
                }
            }
            kept = next;
            if !changed {
                break;
            }
        }
        PartitioningSet::new(self, kept)
    }
}

fn bucket(n: usize, key: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut start = vec![0u32; n + 1];
    for &k in key {
        start[k as usize + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut items = vec![0u32; key.len()];
    for (a, &k) in key.iter().enumerate() {
        items[fill[k as usize] as usize] = a as u32;
        fill[k as usize] += 1;
    }
    (start, items)
}

/// Union-find with path halving and union by size.
#[derive(Clone, Debug)]
pub(crate) struct Dsu {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = self.parent[x] as usize;
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a as u32;
        self.size[a] += self.size[b];
        true
    }
}

/// A set of arc ids of one graph together with its total weight.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PartitioningSet {
    arcs: Vec<ArcId>,
    total_weight: Weight,
}

impl PartitioningSet {
    pub fn new(g: &WeightedDag, arcs: impl IntoIterator<Item = ArcId>) -> Result<Self> {
        let mut arcs: Vec<ArcId> = arcs.into_iter().collect();
        arcs.sort_unstable();
        arcs.dedup();
        let mut total: Weight = 0;
        for &a in &arcs {
            if a >= g.arc_count() {
                return Err(Error::UnknownArc(a));
            }
            total = total.checked_add(g.weight(a)).ok_or(Error::WeightOverflow)?;
        }
        Ok(PartitioningSet {
            arcs,
            total_weight: total,
        })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Caller guarantees `arcs` is sorted, duplicate-free and sums to `total_weight`.
    pub(crate) fn from_sorted(arcs: Vec<ArcId>, total_weight: Weight) -> Self {
        debug_assert!(arcs.windows(2).all(|p| p[0] < p[1]));
        PartitioningSet { arcs, total_weight }
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    pub fn total_weight(&self) -> Weight {
        self.total_weight
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains(&self, a: ArcId) -> bool {
        self.arcs.binary_search(&a).is_ok()
    }

    /// Same arcs as `(tail, head)` pairs of `g`.
    pub fn endpoints(&self, g: &WeightedDag) -> Vec<(Vertex, Vertex)> {
        self.arcs.iter().map(|&a| (g.tail(a), g.head(a))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dag(n: usize, arcs: &[(usize, usize, u64)]) -> WeightedDag {
        WeightedDag::new(n, arcs.iter().copied()).unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(dag(1, &[]).reverse_topological_order(), vec![0]);
        assert_eq!(dag(3, &[(0, 1, 1), (1, 2, 1)]).reverse_topological_order(), vec![2, 1, 0]);
        assert_eq!(dag(3, &[(0, 1, 1), (0, 2, 1)]).reverse_topological_order(), vec![1, 2, 0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(WeightedDag::new(2, [(0, 1, 1), (1, 0, 1)]).unwrap_err(), Error::NotADag);
        assert_eq!(WeightedDag::new(2, [(0, 1, 1), (0, 1, 2)]).unwrap_err(), Error::DuplicateArc(0, 1));
        assert_eq!(WeightedDag::new(2, [(0, 0, 1)]).unwrap_err(), Error::SelfLoop(0));
        assert_eq!(WeightedDag::new(2, [(0, 1, 0)]).unwrap_err(), Error::ZeroWeight(0, 1));
        assert_eq!(
            WeightedDag::new(2, [(0, 2, 1)]).unwrap_err(),
            Error::VertexOutOfRange { vertex: 2, n: 2 }
        );
        assert_eq!(
            WeightedDag::new(3, [(0, 1, u64::MAX), (0, 2, 1)]).unwrap_err(),
            Error::WeightOverflow
        );
    }

    #[test]
    fn sinks_and_components() {
        let path = dag(3, &[(0, 1, 1), (1, 2, 1)]);
        assert_eq!(path.sinks(), vec![2]);
        assert_eq!(dag(3, &[]).sinks(), vec![0, 1, 2]);
        assert_eq!(path.weak_components(&[1]).unwrap(), vec![vec![0, 1], vec![2]]);
        assert_eq!(path.weak_components(&[0, 1]).unwrap().len(), 3);
        assert_eq!(path.weak_components(&[5]).unwrap_err(), Error::UnknownArc(5));
    }

    #[test]
    fn diamond_validity() {
        let g = dag(3, &[(0, 1, 3), (0, 2, 1)]);
        let none = PartitioningSet::empty();
        let cut = PartitioningSet::new(&g, [1]).unwrap();
        assert!(!g.is_valid_partitioning_set(&none));
        assert!(!g.reaches_exactly_one_sink(&none));
        assert!(g.is_valid_partitioning_set(&cut));
        assert!(g.reaches_exactly_one_sink(&cut));
        assert_eq!(cut.total_weight(), 1);
    }

    #[test]
    fn minimalize_star() {
        let g = dag(4, &[(1, 0, 1), (2, 0, 1), (3, 0, 1)]);
        let all = PartitioningSet::new(&g, 0..3).unwrap();
        assert!(g.minimalize(&all).unwrap().is_empty());
        let bad = dag(3, &[(0, 1, 1), (0, 2, 1)]);
        assert_eq!(bad.minimalize(&PartitioningSet::empty()).unwrap_err(), Error::NotPartitioning);
    }

    #[test]
    fn find_arc_lookup() {
        let g = dag(4, &[(0, 3, 1), (0, 1, 1), (0, 2, 1)]);
        assert_eq!(g.find_arc(0, 2), Some(2));
        assert_eq!(g.find_arc(2, 0), None);
        assert_eq!(g.out_arcs(0).map(|a| g.head(a)).collect::<Vec<_>>(), vec![1, 2, 3]);
    }
}
