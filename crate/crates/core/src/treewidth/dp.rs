use std::collections::HashMap;

use super::pattern::{bits, squeeze, Pattern};
use super::{make_nice, validate_td, NiceKind, NiceTreeDecomposition, TdError, TreeDecomposition, MAX_WIDTH};
use crate::graph::{Vertex, WeightedDag, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BagArc {
    pub tail: Vertex,
    pub head: Vertex,
    pub weight: Weight,
}

/// Minimum partial-solution weight per pattern; a missing pattern means infinity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DpTable {
    bag: Vec<Vertex>,
    entries: HashMap<Pattern, Weight>,
}

impl DpTable {
    pub fn bag(&self) -> &[Vertex] {
        &self.bag
    }

    pub fn get(&self, p: &Pattern) -> Option<Weight> {
        self.entries.get(p).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Pattern, Weight)> {
        self.entries.iter().map(|(p, &w)| (p, w))
    }

    pub fn entries(&self) -> &HashMap<Pattern, Weight> {
        &self.entries
    }

    fn update(&mut self, p: Pattern, w: Weight) {
        self.entries.entry(p).and_modify(|x| *x = (*x).min(w)).or_insert(w);
    }
}

/// `log2` of the largest possible table at width `t`:
/// `3^C(2t+2, 2) * 3^C(t+1, 2) * (2t+2)^(2t+2)`.
pub fn pattern_count_bound_log2(t: usize) -> f64 {
    let c2 = |x: usize| (x * x.saturating_sub(1) / 2) as f64;
    let s = (2 * t + 2) as f64;
    (c2(2 * t + 2) + c2(t + 1)) * 3f64.log2() + s * s.log2()
}

pub fn dp_leaf() -> DpTable {
    let mut t = DpTable::default();
    t.update(Pattern::empty(), 0);
    t
}

pub fn dp_forget(child: &DpTable, v: Vertex) -> DpTable {
    let mut out = DpTable {
        bag: child.bag.iter().copied().filter(|&x| x != v).collect(),
        entries: HashMap::new(),
    };
    for (p, w) in child.iter() {
        let i = p.index(v).expect("forgotten vertex is in the bag");
        let vb = 1u32 << i;
        let ext = p.external();
        let sink = p.reach[i] == 0;
        let isolated = sink && p.in_neighbours(i) == 0;
        let part = p.parts[p.part_of(i)];
        let next = if isolated {
            (part == vb).then(|| p.without(vb))
        } else if sink {
            (part & ext == 0).then(|| {
                let mut q = p.clone();
                q.bag &= !vb;
                q.kept[i] = 0;
                for row in &mut q.kept {
                    *row &= !vb;
                }
                q
            })
        } else {
            match bits(ext).find(|&u| p.in_neighbours(u) == vb) {
                None => Some(p.without(vb)),
                Some(u) => (part == vb | 1 << u).then(|| p.without(vb | 1 << u)),
            }
        };
        if let Some(q) = next {
            out.update(q, w);
        }
    }
    out
}

/// `arcs` are the arcs between `v` and the child's bag.
pub fn dp_introduce(child: &DpTable, v: Vertex, arcs: &[BagArc]) -> DpTable {
    let mut bag = child.bag.clone();
    let at = bag.binary_search(&v).expect_err("introduced vertex is new");
    bag.insert(at, v);
    let mut out = DpTable {
        bag,
        entries: HashMap::new(),
    };
    let all_weight: Weight = arcs.iter().map(|a| a.weight).sum();
    for (p, w) in child.iter() {
        let (q, at) = p.with_vertex(v);
        let vb = 1u32 << at;
        let ends: Vec<(usize, bool)> = arcs
            .iter()
            .map(|a| {
                let from_v = a.tail == v;
                let other = if from_v { a.head } else { a.tail };
                (q.index(other).expect("arc endpoint lies in the bag"), from_v)
            })
            .collect();
        'subsets: for sub in 0u32..1 << arcs.len() {
            let mut part: Option<usize> = None;
            let mut r = q.clone();
            let mut out_v = 0u32;
            let mut direct_in = 0u32;
            let mut kept_weight = 0;
            for j in bits(sub) {
                let (o, from_v) = ends[j];
                let pj = q.part_of(o);
                if part.is_some_and(|x| x != pj) {
                    continue 'subsets;
                }
                part = Some(pj);
                kept_weight += arcs[j].weight;
                if from_v {
                    r.kept[at] |= 1 << o;
                    out_v |= 1 << o | q.reach[o];
                } else {
                    r.kept[o] |= vb;
                    direct_in |= 1 << o;
                }
            }
            for x in 0..r.verts.len() {
                if direct_in >> x & 1 == 1 || q.reach[x] & direct_in != 0 {
                    r.reach[x] |= vb | out_v;
                }
            }
            r.reach[at] = out_v;
            let weight = w + all_weight - kept_weight;
            match part {
                Some(k) => {
                    r.parts[k] |= vb;
                    r.parts.sort_unstable();
                    out.update(r, weight);
                }
                None => {
                    for k in 0..r.parts.len() {
                        let mut s = r.clone();
                        s.parts[k] |= vb;
                        s.parts.sort_unstable();
                        out.update(s, weight);
                    }
                    r.parts.push(vb);
                    r.parts.sort_unstable();
                    out.update(r, weight);
                }
            }
        }
    }
    out
}

type JoinKey = (Vec<u32>, Vec<u32>);

fn join_key(p: &Pattern) -> JoinKey {
    let kept = bits(p.bag).map(|i| squeeze(p.kept[i], p.bag)).collect();
    let mut parts: Vec<u32> = p.parts.iter().map(|&x| squeeze(x, p.bag)).collect();
    parts.sort_unstable();
    (kept, parts)
}

fn remap(mask: u32, map: &[usize]) -> u32 {
    bits(mask).fold(0, |m, i| m | 1 << map[i])
}

fn merge(l: &Pattern, r: &Pattern) -> Option<Pattern> {
    let mut verts = l.verts.clone();
    verts.extend_from_slice(&r.verts);
    verts.sort_unstable();
    verts.dedup();
    let pos = |v: u32| verts.binary_search(&v).unwrap();
    let lm: Vec<usize> = l.verts.iter().map(|&v| pos(v)).collect();
    let rm: Vec<usize> = r.verts.iter().map(|&v| pos(v)).collect();
    let n = verts.len();
    let mut kept = vec![0u32; n];
    let mut reach = vec![0u32; n];
    for (i, &ni) in lm.iter().enumerate() {
        kept[ni] = remap(l.kept[i], &lm);
        reach[ni] |= remap(l.reach[i], &lm);
    }
    for (i, &ni) in rm.iter().enumerate() {
        reach[ni] |= remap(r.reach[i], &rm);
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i] >> k & 1 == 1 {
                reach[i] |= reach[k];
            }
        }
    }
    let bag = remap(l.bag, &lm);
    let mut parts: Vec<u32> = l.parts.iter().map(|&p| remap(p, &lm)).collect();
    for &p in &r.parts {
        let mapped = remap(p, &rm);
        let home = parts.iter_mut().find(|q| **q & bag == mapped & bag).expect("children agree on the bag partition");
        *home |= mapped;
        if (*home & !bag).count_ones() > 1 {
            return None;
        }
    }
    parts.sort_unstable();
    Some(Pattern {
        verts,
        bag,
        kept,
        reach,
        parts,
    })
}

/// `bag_arcs` are all arcs with both endpoints in the (shared) bag.
pub fn dp_join(left: &DpTable, right: &DpTable, bag_arcs: &[BagArc]) -> DpTable {
    debug_assert_eq!(left.bag, right.bag);
    let mut out = DpTable {
        bag: left.bag.clone(),
        entries: HashMap::new(),
    };
    let bag_weight: Weight = bag_arcs.iter().map(|a| a.weight).sum();
    let mut by_key: HashMap<JoinKey, Vec<(&Pattern, Weight)>> = HashMap::new();
    for (p, w) in right.iter() {
        by_key.entry(join_key(p)).or_default().push((p, w));
    }
    for (lp, lw) in left.iter() {
        let Some(partners) = by_key.get(&join_key(lp)) else {
            continue;
        };
        let kept_weight: Weight = bag_arcs
            .iter()
            .filter(|a| {
                let (t, h) = (lp.index(a.tail).unwrap(), lp.index(a.head).unwrap());
                lp.kept[t] >> h & 1 == 1
            })
            .map(|a| a.weight)
            .sum();
        for &(rp, rw) in partners {
            if let Some(m) = merge(lp, rp) {
                out.update(m, lw + rw + kept_weight - bag_weight);
            }
        }
    }
    out
}

fn arcs_between(g: &WeightedDag, v: Vertex, bag: &[Vertex]) -> Vec<BagArc> {
    let inside = |x: Vertex| x != v && bag.binary_search(&x).is_ok();
    let out = g.out_arcs(v).filter(|&a| inside(g.head(a)));
    let inn = g.in_arcs(v).filter(|&a| inside(g.tail(a)));
    out.chain(inn)
        .map(|a| BagArc {
            tail: g.tail(a),
            head: g.head(a),
            weight: g.weight(a),
        })
        .collect()
}

fn arcs_inside(g: &WeightedDag, bag: &[Vertex]) -> Vec<BagArc> {
    bag.iter()
        .flat_map(|&u| g.out_arcs(u).filter(|&a| bag.binary_search(&g.head(a)).is_ok()))
        .map(|a| BagArc {
            tail: g.tail(a),
            head: g.head(a),
            weight: g.weight(a),
        })
        .collect()
}

fn evaluate(g: &WeightedDag, nice: &NiceTreeDecomposition, keep_all: bool) -> (Vec<Option<DpTable>>, usize) {
    let nodes = nice.nodes();
    let mut tables: Vec<Option<DpTable>> = vec![None; nodes.len()];
    let mut largest = 0;
    let bound = pattern_count_bound_log2(nice.width());
    for (x, node) in nodes.iter().enumerate() {
        let mut child = |k: usize| -> DpTable {
            let c = node.children[k];
            if keep_all {
                tables[c].clone().expect("child evaluated first")
            } else {
                tables[c].take().expect("child evaluated first")
            }
        };
        let table = match node.kind {
            NiceKind::Leaf => dp_leaf(),
            NiceKind::Forget(v) => dp_forget(&child(0), v),
            NiceKind::Introduce(v) => {
                let c = child(0);
                let arcs = arcs_between(g, v, &c.bag);
                dp_introduce(&c, v, &arcs)
            }
            NiceKind::Join => {
                let (l, r) = (child(0), child(1));
                dp_join(&l, &r, &arcs_inside(g, &node.bag))
            }
        };
        debug_assert!((table.len() as f64).log2() <= bound);
        largest = largest.max(table.len());
        tables[x] = Some(table);
    }
    (tables, largest)
}

/// Tables of every node of `nice`, indexed like its nodes.
pub fn dp_tables(g: &WeightedDag, nice: &NiceTreeDecomposition) -> Vec<DpTable> {
    evaluate(g, nice, true).0.into_iter().map(|t| t.expect("every node evaluated")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreewidthSolution {
    pub optimum: Weight,
    pub within_budget: bool,
    pub width: usize,
    pub largest_table: usize,
}

/// Minimum partitioning-set weight via the DP over `td`, refusing widths above `cap`.
pub fn solve_treewidth(g: &WeightedDag, td: &TreeDecomposition, budget: Weight, cap: usize) -> Result<TreewidthSolution, TdError> {
    let width = validate_td(g, td)?;
    if width > cap.min(MAX_WIDTH) {
        return Err(TdError::WidthAboveCap {
            width,
            cap: cap.min(MAX_WIDTH),
        });
    }
    let nice = make_nice(td)?;
    let (mut tables, largest_table) = evaluate(g, &nice, false);
    let root = tables[nice.root()].take().expect("root evaluated");
    let optimum = root
        .get(&Pattern::empty())
        .expect("deleting every arc is always a partitioning set");
    Ok(TreewidthSolution {
        optimum,
        within_budget: optimum <= budget,
        width,
        largest_table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treewidth::forest_decomposition;

    #[test]
    fn leaf_table() {
        let t = dp_leaf();
        assert_eq!(t.len(), 1);
        assert_eq!(t.get(&Pattern::empty()), Some(0));
        assert_eq!(t.get(&Pattern::from_parts(&[0], &[], &[], &[], &[vec![0]])), None);
    }

    #[test]
    fn introduce_isolated_vertex() {
        let t = dp_introduce(&dp_leaf(), 4, &[]);
        assert_eq!(t.len(), 1);
        let p = Pattern::from_parts(&[4], &[], &[], &[], &[vec![4]]);
        assert_eq!(t.get(&p), Some(0));
        let back = dp_forget(&t, 4);
        assert_eq!(back.get(&Pattern::empty()), Some(0));
    }

    #[test]
    fn introduce_weighs_dropped_arcs() {
        let a = dp_introduce(&dp_leaf(), 0, &[]);
        let arc = BagArc { tail: 1, head: 0, weight: 3 };
        let t = dp_introduce(&a, 1, &[arc]);
        let kept = Pattern::from_parts(&[0, 1], &[], &[(1, 0)], &[(1, 0)], &[vec![0, 1]]);
        let dropped = Pattern::from_parts(&[0, 1], &[], &[], &[], &[vec![0], vec![1]]);
        let dropped_joined = Pattern::from_parts(&[0, 1], &[], &[], &[], &[vec![0, 1]]);
        assert_eq!(t.get(&kept), Some(0));
        assert_eq!(t.get(&dropped), Some(3));
        assert_eq!(t.get(&dropped_joined), Some(3));
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn introduce_skips_split_endpoints() {
        let base = dp_introduce(&dp_introduce(&dp_leaf(), 0, &[]), 1, &[]);
        let arcs = [BagArc { tail: 2, head: 0, weight: 1 }, BagArc { tail: 2, head: 1, weight: 1 }];
        let t = dp_introduce(&base, 2, &arcs);
        let both = Pattern::from_parts(&[0, 1, 2], &[], &[(2, 0), (2, 1)], &[(2, 0), (2, 1)], &[vec![0, 2], vec![1]]);
        assert_eq!(t.get(&both), None);
        assert!(t.iter().all(|(p, _)| p.is_well_formed()));
    }

    #[test]
    fn forget_drops_unmatched_sinks() {
        let p = Pattern::from_parts(&[0, 1], &[5], &[], &[(1, 5)], &[vec![0, 1, 5]]);
        let mut t = DpTable {
            bag: vec![0, 1],
            entries: HashMap::new(),
        };
        t.update(p, 2);
        assert!(dp_forget(&t, 0).is_empty());
    }

    #[test]
    fn join_requires_same_kept_arcs() {
        let mut l = DpTable { bag: vec![0, 1], entries: HashMap::new() };
        let mut r = l.clone();
        l.update(Pattern::from_parts(&[0, 1], &[], &[(1, 0)], &[(1, 0)], &[vec![0, 1]]), 0);
        r.update(Pattern::from_parts(&[0, 1], &[], &[], &[], &[vec![0, 1]]), 1);
        assert!(dp_join(&l, &r, &[BagArc { tail: 1, head: 0, weight: 1 }]).is_empty());
    }

    #[test]
    fn join_rejects_two_external_sinks() {
        let mut l = DpTable { bag: vec![0], entries: HashMap::new() };
        let mut r = l.clone();
        l.update(Pattern::from_parts(&[0], &[3], &[], &[(0, 3)], &[vec![0, 3]]), 0);
        r.update(Pattern::from_parts(&[0], &[4], &[], &[(0, 4)], &[vec![0, 4]]), 0);
        assert!(dp_join(&l, &r, &[]).is_empty());
        let empty = dp_leaf();
        assert_eq!(dp_join(&empty, &empty, &[]).get(&Pattern::empty()), Some(0));
    }

    #[test]
    fn small_instances() {
        let path = WeightedDag::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let td = forest_decomposition(&path).unwrap();
        assert_eq!(solve_treewidth(&path, &td, 0, 6).unwrap().optimum, 0);
        let diamond = WeightedDag::new(3, [(0, 1, 3), (0, 2, 1)]).unwrap();
        let td = forest_decomposition(&diamond).unwrap();
        let sol = solve_treewidth(&diamond, &td, 0, 6).unwrap();
        assert_eq!(sol.optimum, 1);
        assert!(!sol.within_budget);
        let wide = TreeDecomposition::new(3, vec![vec![0, 1, 2]], vec![]);
        assert_eq!(
            solve_treewidth(&diamond, &wide, 0, 1).unwrap_err(),
            TdError::WidthAboveCap { width: 2, cap: 1 }
        );
    }
}
