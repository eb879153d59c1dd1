//! Linear-time data reduction: arc redirection (Rule 1) and removal of
//! vertices that reach a single sink (Rule 2), with a log for lifting witnesses.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{ArcId, PartitioningSet, Vertex, WeightedDag, Weight};

const MULTIPLE: u32 = u32::MAX;
const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SinkLabel {
    Unique(Vertex),
    Multiple,
}

/// For each vertex, the single sink it reaches or [`SinkLabel::Multiple`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SinkReachability {
    labels: Vec<u32>,
}

impl SinkReachability {
    pub fn label(&self, v: Vertex) -> SinkLabel {
        match self.labels[v] {
            MULTIPLE => SinkLabel::Multiple,
            s => SinkLabel::Unique(s as usize),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

pub fn compute_sink_labels(g: &WeightedDag) -> SinkReachability {
    let heads = g.heads_raw();
    let mut labels = vec![MULTIPLE; g.vertex_count()];
    for &v in g.rev_topo_raw() {
        let out = g.out_slice(v as usize);
        labels[v as usize] = match out.split_first() {
            None => v,
            Some((&first, rest)) => {
                let l = labels[heads[first as usize] as usize];
                if l != MULTIPLE && rest.iter().all(|&a| labels[heads[a as usize] as usize] == l) {
                    l
                } else {
                    MULTIPLE
                }
            }
        };
    }
    SinkReachability { labels }
}

/// One Rule-1 application: `deleted` was folded into the arc `(tail, sink)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MergeEvent {
    pub deleted: ArcId,
    pub tail: Vertex,
    pub sink: Vertex,
    pub added_weight: Weight,
}

/// A vertex removed by Rule 2 together with the arcs that went with it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexDeletion {
    pub vertex: Vertex,
    pub arcs: Vec<ArcId>,
}

/// Maps arcs of a derived graph to the arc sets of its source they stand for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct ArcOrigins {
    start: Vec<u32>,
    items: Vec<u32>,
}

impl ArcOrigins {
    pub(crate) fn identity(m: usize) -> Self {
        ArcOrigins {
            start: (0..=m as u32).collect(),
            items: (0..m as u32).collect(),
        }
    }

    pub(crate) fn with_capacity(m: usize) -> Self {
        let mut start = Vec::with_capacity(m + 1);
        start.push(0);
        ArcOrigins {
            start,
            items: Vec::with_capacity(m),
        }
    }

    pub(crate) fn push(&mut self, origins: impl IntoIterator<Item = u32>) {
        self.items.extend(origins);
        self.start.push(self.items.len() as u32);
    }

    pub(crate) fn len(&self) -> usize {
        self.start.len() - 1
    }

    pub(crate) fn get(&self, a: ArcId) -> &[u32] {
        &self.items[self.start[a] as usize..self.start[a + 1] as usize]
    }

    /// `self` maps C→B and `inner` maps B→A; the result maps C→A.
    pub(crate) fn compose(&self, inner: &ArcOrigins) -> ArcOrigins {
        let mut out = ArcOrigins::with_capacity(self.len());
        for a in 0..self.len() {
            out.push(self.get(a).iter().flat_map(|&b| inner.get(b as usize).iter().copied()));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule1Log {
    pub merges: Vec<MergeEvent>,
    origins: ArcOrigins,
}

impl Rule1Log {
    /// Arcs of the input graph represented by arc `a` of the output.
    pub fn origins(&self, a: ArcId) -> Vec<ArcId> {
        self.origins.get(a).iter().map(|&x| x as usize).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule2Log {
    pub deletions: Vec<VertexDeletion>,
    vertex_map: Vec<u32>,
    arc_map: Vec<u32>,
}

impl Rule2Log {
    pub fn new_vertex(&self, v: Vertex) -> Option<Vertex> {
        let x = self.vertex_map[v];
        (x != NONE).then_some(x as usize)
    }

    pub fn source_arc(&self, a: ArcId) -> ArcId {
        self.arc_map[a] as usize
    }
}

pub fn apply_rule1(g: &WeightedDag, labels: &SinkReachability) -> (WeightedDag, Rule1Log) {
    let n = g.vertex_count();
    let heads = g.heads_raw();
    let m = g.arc_count();
    let mut tail = Vec::with_capacity(m);
    let mut head = Vec::with_capacity(m);
    let mut weight: Vec<Weight> = Vec::with_capacity(m);
    let mut origins = ArcOrigins::with_capacity(m);
    let mut merges = Vec::new();
    let mut slot = vec![NONE; n];
    let mut entries: Vec<(u32, Weight, Vec<u32>)> = Vec::new();
    let redirect = |w: usize| !g.is_sink(w) && labels.labels[w] != MULTIPLE;

    for v in 0..n {
        let out = g.out_slice(v);
        if labels.labels[v] != MULTIPLE {
            for &a in out {
                tail.push(v as u32);
                head.push(heads[a as usize]);
                weight.push(g.weight(a as usize));
                origins.push([a]);
            }
            continue;
        }
        for &a in out {
            let w = heads[a as usize] as usize;
            let t = if redirect(w) { labels.labels[w] as usize } else { w };
            if g.is_sink(t) {
                slot[t] = NONE;
            }
        }
        entries.clear();
        for &a in out {
            let w = heads[a as usize] as usize;
            let t = if redirect(w) { labels.labels[w] as usize } else { w };
            let idx = if !g.is_sink(t) {
                entries.push((t as u32, 0, Vec::new()));
                entries.len() - 1
            } else {
                if slot[t] == NONE {
                    slot[t] = entries.len() as u32;
                    entries.push((t as u32, 0, Vec::new()));
                }
                slot[t] as usize
            };
            entries[idx].1 += g.weight(a as usize);
            entries[idx].2.push(a);
            if redirect(w) {
                merges.push(MergeEvent {
                    deleted: a as usize,
                    tail: v,
                    sink: t,
                    added_weight: g.weight(a as usize),
                });
            }
        }
        entries.sort_unstable_by_key(|e| e.0);
        for (h, w, mut group) in entries.drain(..) {
            group.sort_unstable();
            tail.push(v as u32);
            head.push(h);
            weight.push(w);
            origins.push(group);
        }
    }
    let reduced = WeightedDag::from_trusted(n, tail, head, weight);
    (reduced, Rule1Log { merges, origins })
}

pub fn apply_rule2(g: &WeightedDag, labels: &SinkReachability) -> (WeightedDag, Rule2Log) {
    let n = g.vertex_count();
    let keep = |v: usize| g.is_sink(v) || labels.labels[v] == MULTIPLE;
    let mut vertex_map = vec![NONE; n];
    let mut next = 0u32;
    let mut deletions = Vec::new();
    for (v, slot) in vertex_map.iter_mut().enumerate() {
        if keep(v) {
            *slot = next;
            next += 1;
        } else {
            let mut arcs: Vec<ArcId> = g.out_arcs(v).chain(g.in_arcs(v)).collect();
            arcs.sort_unstable();
            deletions.push(VertexDeletion { vertex: v, arcs });
        }
    }
    let mut tail = Vec::new();
    let mut head = Vec::new();
    let mut weight = Vec::new();
    let mut arc_map = Vec::new();
    for (a, (u, v, w)) in g.arcs().enumerate() {
        if vertex_map[u] != NONE && vertex_map[v] != NONE {
            tail.push(vertex_map[u]);
            head.push(vertex_map[v]);
            weight.push(w);
            arc_map.push(a as u32);
        }
    }
    let reduced = WeightedDag::from_trusted(next as usize, tail, head, weight);
    (
        reduced,
        Rule2Log {
            deletions,
            vertex_map,
            arc_map,
        },
    )
}

/// Provenance of a full reduction, relative to the original instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionLog {
    original_n: usize,
    original_m: usize,
    pub merges: Vec<MergeEvent>,
    pub deletions: Vec<VertexDeletion>,
    vertex_map: Vec<u32>,
    origins: ArcOrigins,
}

impl ReductionLog {
    pub fn identity(g: &WeightedDag) -> Self {
        ReductionLog {
            original_n: g.vertex_count(),
            original_m: g.arc_count(),
            merges: Vec::new(),
            deletions: Vec::new(),
            vertex_map: (0..g.vertex_count() as u32).collect(),
            origins: ArcOrigins::identity(g.arc_count()),
        }
    }

    pub fn reduced_arc_count(&self) -> usize {
        self.origins.len()
    }

    /// Reduced id of an original vertex, if it survived.
    pub fn vertex(&self, v: Vertex) -> Option<Vertex> {
        let x = self.vertex_map[v];
        (x != NONE).then_some(x as usize)
    }

    pub fn original_arcs(&self, a: ArcId) -> Vec<ArcId> {
        self.origins.get(a).iter().map(|&x| x as usize).collect()
    }

    pub(crate) fn arc_origins(&self) -> &ArcOrigins {
        &self.origins
    }

    /// Re-applies the recorded merges and deletions to `original`.
    pub fn replay(&self, original: &WeightedDag) -> Result<WeightedDag> {
        if original.vertex_count() != self.original_n || original.arc_count() != self.original_m {
            return Err(Error::InvalidArgument("log belongs to a different graph".into()));
        }
        let mut arcs: HashMap<(Vertex, Vertex), Weight> = original.arcs().map(|(u, v, w)| ((u, v), w)).collect();
        for e in &self.merges {
            let (u, v, w) = original.arc(e.deleted);
            if e.tail != u || arcs.remove(&(u, v)) != Some(w) || e.added_weight != w {
                return Err(Error::InvalidArgument(format!("merge of arc {} does not replay", e.deleted)));
            }
            *arcs.entry((e.tail, e.sink)).or_insert(0) += w;
        }
        for d in &self.deletions {
            for &a in &d.arcs {
                arcs.remove(&(original.tail(a), original.head(a)));
            }
        }
        let mut list: Vec<(Vertex, Vertex, Weight)> = Vec::with_capacity(arcs.len());
        for ((u, v), w) in arcs {
            match (self.vertex(u), self.vertex(v)) {
                (Some(x), Some(y)) => list.push((x, y, w)),
                _ => return Err(Error::InvalidArgument(format!("arc ({u}, {v}) survives a deleted vertex"))),
            }
        }
        list.sort_unstable();
        let n = self.vertex_map.iter().filter(|&&x| x != NONE).count();
        WeightedDag::new(n, list)
    }
}

/// Applies both rules once, which is exhaustive.
pub fn reduce(g: &WeightedDag) -> (WeightedDag, ReductionLog) {
    let labels = compute_sink_labels(g);
    let (g1, log1) = apply_rule1(g, &labels);
    let (g2, log2) = apply_rule2(&g1, &labels);
    let mut origins = ArcOrigins::with_capacity(g2.arc_count());
    for a in 0..g2.arc_count() {
        origins.push(log1.origins.get(log2.arc_map[a] as usize).iter().copied());
    }
    let deletions = log2
        .deletions
        .into_iter()
        .map(|d| {
            let mut arcs: Vec<ArcId> = d
                .arcs
                .iter()
                .flat_map(|&a| log1.origins.get(a).iter().map(|&x| x as usize))
                .collect();
            arcs.sort_unstable();
            VertexDeletion { vertex: d.vertex, arcs }
        })
        .collect();
    let log = ReductionLog {
        original_n: g.vertex_count(),
        original_m: g.arc_count(),
        merges: log1.merges,
        deletions,
        vertex_map: log2.vertex_map,
        origins,
    };
    (g2, log)
}

/// Expands each reduced arc of `s_reduced` into the original arcs it stands for.
pub fn lift_witness(log: &ReductionLog, s_reduced: &PartitioningSet) -> Result<PartitioningSet> {
    let mut arcs = Vec::new();
    for &a in s_reduced.arcs() {
        if a >= log.reduced_arc_count() {
            return Err(Error::UnknownArc(a));
        }
        arcs.extend(log.origins.get(a).iter().map(|&x| x as usize));
    }
    arcs.sort_unstable();
    arcs.dedup();
    Ok(PartitioningSet::from_sorted(arcs, s_reduced.total_weight()))
}

/// Some arc `(v, w)` has `v` reaching several sinks and `w` a non-sink reaching one.
pub fn rule1_applicable(g: &WeightedDag, labels: &SinkReachability) -> bool {
    g.arcs().any(|(v, w, _)| labels.labels[v] == MULTIPLE && !g.is_sink(w) && labels.labels[w] != MULTIPLE)
}

/// Some non-sink reaches exactly one sink.
pub fn rule2_applicable(g: &WeightedDag, labels: &SinkReachability) -> bool {
    (0..g.vertex_count()).any(|v| !g.is_sink(v) && labels.labels[v] != MULTIPLE)
}

pub fn is_reduced(g: &WeightedDag) -> bool {
    let labels = compute_sink_labels(g);
    !rule1_applicable(g, &labels) && !rule2_applicable(g, &labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    // s1=0 s2=1 a=2 b=3 w=4 v=5 e=6 f=7
    fn fig1() -> WeightedDag {
        let arcs = [(2, 0), (3, 0), (4, 3), (5, 4), (5, 1), (4, 2), (6, 5), (5, 7), (7, 1)];
        WeightedDag::new(8, arcs.iter().map(|&(u, v)| (u, v, 1))).unwrap()
    }

    fn sorted_arcs(g: &WeightedDag) -> Vec<(Vertex, Vertex, Weight)> {
        let mut v: Vec<_> = g.arcs().collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn labels_on_figure() {
        let labels = compute_sink_labels(&fig1());
        assert_eq!(labels.label(4), SinkLabel::Unique(0));
        assert_eq!(labels.label(5), SinkLabel::Multiple);
        assert_eq!(labels.label(6), SinkLabel::Multiple);
        assert_eq!(labels.label(7), SinkLabel::Unique(1));
        assert_eq!(labels.label(0), SinkLabel::Unique(0));
    }

    #[test]
    fn rule1_redirects_into_sinks() {
        let g = fig1();
        let labels = compute_sink_labels(&g);
        let (g1, log) = apply_rule1(&g, &labels);
        let expected = vec![(2, 0, 1), (3, 0, 1), (4, 2, 1), (4, 3, 1), (5, 0, 1), (5, 1, 2), (6, 5, 1), (7, 1, 1)];
        assert_eq!(sorted_arcs(&g1), expected);
        assert_eq!(log.merges.len(), 2);
        let vs2 = g1.find_arc(5, 1).unwrap();
        let mut origins = log.origins(vs2);
        origins.sort_unstable();
        assert_eq!(origins, vec![g.find_arc(5, 1).unwrap(), g.find_arc(5, 7).unwrap()]);
    }

    #[test]
    fn rule2_removes_single_sink_regions() {
        let g = fig1();
        let (r, log) = reduce(&g);
        assert_eq!(r.vertex_count(), 4);
        let (s1, s2, v, e) = (log.vertex(0).unwrap(), log.vertex(1).unwrap(), log.vertex(5).unwrap(), log.vertex(6).unwrap());
        let mut expected = vec![(v, s1, 1), (v, s2, 2), (e, v, 1)];
        expected.sort_unstable();
        assert_eq!(sorted_arcs(&r), expected);
        assert_eq!(log.deletions.iter().map(|d| d.vertex).collect::<Vec<_>>(), vec![2, 3, 4, 7]);
        assert!(is_reduced(&r));
    }

    #[test]
    fn single_sink_collapses() {
        let g = WeightedDag::new(4, [(1, 0, 1), (2, 1, 1), (3, 1, 2)]).unwrap();
        let (r, _) = reduce(&g);
        assert_eq!(r.vertex_count(), 1);
        assert_eq!(r.arc_count(), 0);
        let labels = compute_sink_labels(&g);
        assert!((0..4).all(|v| labels.label(v) == SinkLabel::Unique(0)));
    }

    #[test]
    fn sink_only_neighbours_unchanged() {
        let g = WeightedDag::new(4, [(2, 0, 1), (2, 1, 1), (3, 2, 1), (3, 1, 1)]).unwrap();
        let labels = compute_sink_labels(&g);
        let (g1, log) = apply_rule1(&g, &labels);
        assert_eq!(sorted_arcs(&g1), sorted_arcs(&g));
        assert!(log.merges.is_empty());
        let (g2, log2) = apply_rule2(&g1, &labels);
        assert_eq!(sorted_arcs(&g2), sorted_arcs(&g));
        assert!(log2.deletions.is_empty());
    }

    #[test]
    fn lifting_on_figure() {
        let g = fig1();
        let (r, log) = reduce(&g);
        let vs2 = r.find_arc(log.vertex(5).unwrap(), log.vertex(1).unwrap()).unwrap();
        let reduced = PartitioningSet::new(&r, [vs2]).unwrap();
        assert!(r.is_valid_partitioning_set(&reduced));
        let lifted = lift_witness(&log, &reduced).unwrap();
        assert_eq!(lifted.total_weight(), 2);
        assert_eq!(lifted.endpoints(&g), vec![(5, 1), (5, 7)]);
        assert!(g.is_valid_partitioning_set(&lifted));
        let bogus = PartitioningSet::from_sorted(vec![99], 1);
        assert_eq!(lift_witness(&log, &bogus).unwrap_err(), Error::UnknownArc(99));
    }

    #[test]
    fn replay_and_fixpoint() {
        let g = fig1();
        let (r, log) = reduce(&g);
        assert_eq!(sorted_arcs(&log.replay(&g).unwrap()), sorted_arcs(&r));
        let (rr, log2) = reduce(&r);
        assert_eq!(sorted_arcs(&rr), sorted_arcs(&r));
        assert!(log2.merges.is_empty() && log2.deletions.is_empty());
    }

    #[test]
    fn identity_log_lifts_unchanged() {
        let g = WeightedDag::new(3, [(0, 1, 3), (0, 2, 1)]).unwrap();
        let log = ReductionLog::identity(&g);
        let s = PartitioningSet::new(&g, [1]).unwrap();
        assert_eq!(lift_witness(&log, &s).unwrap(), s);
    }
}
