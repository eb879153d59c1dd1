//! Exhaustive ground truth for small instances.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::generators::CnfFormula;
use crate::graph::{Dsu, PartitioningSet, Vertex, WeightedDag, Weight};
use crate::heuristic::heuristic_partition;
use crate::treewidth::Pattern;

pub const BRUTE_MAX_ARCS: usize = 22;
pub const PARTIAL_MAX_ARCS: usize = 18;
pub const SAT_MAX_VARS: usize = 20;

struct Search<'a> {
    g: &'a WeightedDag,
    deleted: Vec<bool>,
    current: Vec<usize>,
    best_weight: Weight,
    best: Option<Vec<usize>>,
}

impl Search<'_> {
    fn visit(&mut self, a: usize, weight: Weight) {
        if weight > self.best_weight {
            return;
        }
        if a == self.g.arc_count() {
            let better = match &self.best {
                None => true,
                Some(b) => weight < self.best_weight || self.current < *b,
            };
            if better && self.g.valid_under_mask(&self.deleted) {
                self.best_weight = weight;
                self.best = Some(self.current.clone());
            }
            return;
        }
        self.deleted[a] = true;
        self.current.push(a);
        self.visit(a + 1, weight + self.g.weight(a));
        self.current.pop();
        self.deleted[a] = false;
        self.visit(a + 1, weight);
    }
}

/// Minimum-weight partitioning set by enumerating arc subsets; among optimal
/// sets the lexicographically smallest sorted arc-id list wins.
pub fn brute_force_min(g: &WeightedDag) -> Result<PartitioningSet> {
    if g.arc_count() > BRUTE_MAX_ARCS {
        return Err(Error::TooLarge(format!(
            "brute force takes at most {BRUTE_MAX_ARCS} arcs, got {}",
            g.arc_count()
        )));
    }
    let mut s = Search {
        g,
        deleted: vec![false; g.arc_count()],
        current: Vec::new(),
        best_weight: heuristic_partition(g).total_weight(),
        best: None,
    };
    s.visit(0, 0);
    let arcs = s.best.expect("the heuristic bound is attained by some subset");
    Ok(PartitioningSet::from_sorted(arcs, s.best_weight))
}

/// Every set partition of `0..k`, as block labels in restricted-growth form.
fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; k];
    fn go(i: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == labels.len() {
            out.push(labels.clone());
            return;
        }
        for l in 0..=max + 1 {
            labels[i] = l;
            go(i + 1, max.max(l), labels, out);
        }
    }
    if k == 0 {
        out.push(Vec::new());
    } else {
        go(1, 0, &mut labels, &mut out);
    }
    out
}

/// Minimum weight of a partial partitioning set for `G[below]` satisfying each
/// pattern at a node with bag `bag`. `below` must contain `bag`.
pub fn enumerate_partial_solutions(
    g: &WeightedDag,
    bag: &[Vertex],
    below: &[Vertex],
) -> Result<HashMap<Pattern, Weight>> {
    let n = g.vertex_count();
    let mut in_u = vec![false; n];
    let mut in_bag = vec![false; n];
    for &v in below {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        in_u[v] = true;
    }
    for &v in bag {
        if v >= n || !in_u[v] {
            return Err(Error::InvalidArgument(format!("bag vertex {v} is not below the node")));
        }
        in_bag[v] = true;
    }
    let arcs: Vec<usize> = (0..g.arc_count())
        .filter(|&a| in_u[g.tail(a)] && in_u[g.head(a)])
        .collect();
    if arcs.len() > PARTIAL_MAX_ARCS {
        return Err(Error::TooLarge(format!(
            "partial-solution enumeration takes at most {PARTIAL_MAX_ARCS} arcs, got {}",
            arcs.len()
        )));
    }
    let mut canonical: HashMap<Pattern, Weight> = HashMap::new();
    let mut bag_sorted = bag.to_vec();
    bag_sorted.sort_unstable();
    let order = g.reverse_topological_order();
    let mut reach: Vec<Vec<bool>> = vec![vec![false; n]; n];
    for sub in 0u32..1 << arcs.len() {
        let kept: Vec<usize> = (0..arcs.len()).filter(|&j| sub >> j & 1 == 0).map(|j| arcs[j]).collect();
        let weight: Weight = (0..arcs.len()).filter(|&j| sub >> j & 1 == 1).map(|j| g.weight(arcs[j])).sum();
        let mut out_deg = vec![0usize; n];
        let mut dsu = Dsu::new(n);
        for &a in &kept {
            out_deg[g.tail(a)] += 1;
            dsu.union(g.tail(a), g.head(a));
        }
        for &v in &order {
            reach[v].iter_mut().for_each(|x| *x = false);
            if !in_u[v] {
                continue;
            }
            for &a in &kept {
                if g.tail(a) == v {
                    let h = g.head(a);
                    reach[v][h] = true;
                    let row = reach[h].clone();
                    for (x, y) in reach[v].iter_mut().zip(row) {
                        *x |= y;
                    }
                }
            }
        }
        let sinks: Vec<Vertex> = below.iter().copied().filter(|&v| out_deg[v] == 0).collect();
        let mut outside_sink_root: HashMap<usize, Vertex> = HashMap::new();
        let mut ok = true;
        for &s in sinks.iter().filter(|&&s| !in_bag[s]) {
            if outside_sink_root.insert(dsu.find(s), s).is_some() {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let bag_roots: Vec<usize> = bag_sorted.iter().map(|&v| dsu.find(v)).collect();
        let reached = |s: Vertex| bag_sorted.iter().any(|&b| b == s || reach[b][s]);
        if sinks
            .iter()
            .any(|&s| bag_roots.contains(&dsu.find(s)) && !reached(s))
        {
            continue;
        }
        let external: Vec<Vertex> = sinks.iter().copied().filter(|&s| !in_bag[s] && reached(s)).collect();
        let verts: Vec<Vertex> = {
            let mut v = bag_sorted.clone();
            v.extend(&external);
            v.sort_unstable();
            v
        };
        let kept_arcs: Vec<(Vertex, Vertex)> = kept
            .iter()
            .filter(|&&a| in_bag[g.tail(a)] && in_bag[g.head(a)])
            .map(|&a| (g.tail(a), g.head(a)))
            .collect();
        let reach_arcs: Vec<(Vertex, Vertex)> = verts
            .iter()
            .flat_map(|&u| {
                let row = &reach[u];
                verts.iter().filter(move |&&w| row[w]).map(move |&w| (u, w))
            })
            .collect();
        let mut blocks: HashMap<usize, Vec<Vertex>> = HashMap::new();
        for &v in &verts {
            blocks.entry(dsu.find(v)).or_default().push(v);
        }
        let partition: Vec<Vec<Vertex>> = blocks.into_values().collect();
        let p = Pattern::from_parts(&bag_sorted, &external, &kept_arcs, &reach_arcs, &partition);
        canonical
            .entry(p)
            .and_modify(|w| *w = (*w).min(weight))
            .or_insert(weight);
    }
    let mut out: HashMap<Pattern, Weight> = HashMap::new();
    for (p, w) in canonical {
        let blocks = p.partition();
        let external = p.external_vertices();
        let ext_count: Vec<usize> = blocks
            .iter()
            .map(|b| b.iter().filter(|v| external.binary_search(v).is_ok()).count())
            .collect();
        for labels in set_partitions(blocks.len()) {
            let k = labels.iter().max().map_or(0, |m| m + 1);
            let mut merged: Vec<Vec<Vertex>> = vec![Vec::new(); k];
            let mut ext = vec![0usize; k];
            for (i, &l) in labels.iter().enumerate() {
                merged[l].extend(&blocks[i]);
                ext[l] += ext_count[i];
            }
            if ext.iter().any(|&c| c > 1) {
                continue;
            }
            let q = Pattern::from_parts(
                &p.bag_vertices(),
                &external,
                &p.kept_arcs(),
                &p.reach_arcs(),
                &merged,
            );
            out.entry(q).and_modify(|x| *x = (*x).min(w)).or_insert(w);
        }
    }
    Ok(out)
}

/// Satisfiability by trying every assignment.
pub fn sat_brute(phi: &CnfFormula) -> Result<bool> {
    let n = phi.variable_count();
    if n > SAT_MAX_VARS {
        return Err(Error::TooLarge(format!("sat_brute takes at most {SAT_MAX_VARS} variables, got {n}")));
    }
    Ok((0u64..1 << n).any(|x| phi.satisfied_by(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> WeightedDag {
        let arcs = [(2, 0, 1), (3, 0, 1), (4, 3, 1), (5, 4, 1), (5, 1, 1), (4, 2, 1), (6, 5, 1), (5, 7, 1), (7, 1, 1)];
        WeightedDag::new(8, arcs).unwrap()
    }

    #[test]
    fn partitioned_graph_costs_nothing() {
        let g = WeightedDag::new(4, [(1, 0, 1), (3, 2, 1)]).unwrap();
        assert_eq!(brute_force_min(&g).unwrap(), PartitioningSet::empty());
    }

    #[test]
    fn diamond_drops_the_light_arc() {
        let g = WeightedDag::new(3, [(2, 0, 3), (2, 1, 1)]).unwrap();
        let s = brute_force_min(&g).unwrap();
        assert_eq!(s.total_weight(), 1);
        assert_eq!(s.endpoints(&g), vec![(2, 1)]);
    }

    #[test]
    fn ties_pick_smallest_ids() {
        let g = WeightedDag::new(3, [(2, 0, 2), (2, 1, 2)]).unwrap();
        assert_eq!(brute_force_min(&g).unwrap().arcs(), &[0]);
    }

    #[test]
    fn reduced_figure_keeps_optimum() {
        let g = fig1();
        let (r, _) = crate::reduction::reduce(&g);
        assert_eq!(brute_force_min(&g).unwrap().total_weight(), brute_force_min(&r).unwrap().total_weight());
    }

    #[test]
    fn size_guards() {
        let arcs: Vec<_> = (1..24).map(|v| (v, 0, 1)).collect();
        let g = WeightedDag::new(24, arcs).unwrap();
        assert!(matches!(brute_force_min(&g), Err(Error::TooLarge(_))));
        assert!(matches!(enumerate_partial_solutions(&g, &[], &(0..24).collect::<Vec<_>>()), Err(Error::TooLarge(_))));
        let phi = CnfFormula::new(21, vec![vec![1]]).unwrap();
        assert!(sat_brute(&phi).is_err());
    }

    #[test]
    fn empty_node_has_the_empty_pattern() {
        let g = fig1();
        let t = enumerate_partial_solutions(&g, &[], &[]).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[&Pattern::empty()], 0);
    }

    #[test]
    fn single_bag_vertex() {
        let g = fig1();
        let t = enumerate_partial_solutions(&g, &[3], &[3]).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[&Pattern::from_parts(&[3], &[], &[], &[], &[vec![3]])], 0);
    }

    #[test]
    fn sat_examples() {
        assert!(sat_brute(&CnfFormula::new(1, vec![vec![1]]).unwrap()).unwrap());
        assert!(!sat_brute(&CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap()).unwrap());
        assert!(sat_brute(&CnfFormula::new(2, vec![vec![1, -2]]).unwrap()).unwrap());
    }

    #[test]
    fn set_partition_counts() {
        let bell: Vec<usize> = (0..6).map(|k| set_partitions(k).len()).collect();
        assert_eq!(bell, vec![1, 1, 2, 5, 15, 52]);
    }
}
