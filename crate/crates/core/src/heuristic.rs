use crate::graph::{PartitioningSet, WeightedDag, Weight};
use crate::reduction::{lift_witness, reduce};

/// Greedy single pass: every vertex joins the sink whose out-arcs into its
/// region are heaviest, and drops the rest. Optimal when the underlying
/// undirected graph is a forest.
pub fn heuristic_partition(g: &WeightedDag) -> PartitioningSet {
    let n = g.vertex_count();
    let heads = g.heads_raw();
    let mut label = vec![0u32; n];
    let mut mass: Vec<Weight> = vec![0; n];
    let mut touched: Vec<u32> = Vec::new();
    let mut deleted = Vec::new();
    let mut total: Weight = 0;
    for &v in g.rev_topo_raw() {
        let out = g.out_slice(v as usize);
        if out.is_empty() {
            label[v as usize] = v;
            continue;
        }
        for &a in out {
            let s = label[heads[a as usize] as usize];
            if mass[s as usize] == 0 {
                touched.push(s);
            }
            mass[s as usize] += g.weight(a as usize);
        }
        let best = touched
            .iter()
            .copied()
            .max_by(|&x, &y| mass[x as usize].cmp(&mass[y as usize]).then(y.cmp(&x)))
            .expect("non-sink has a labelled out-neighbour");
        label[v as usize] = best;
        for &a in out {
            if label[heads[a as usize] as usize] != best {
                deleted.push(a as usize);
                total += g.weight(a as usize);
            }
        }
        for s in touched.drain(..) {
            mass[s as usize] = 0;
        }
    }
    deleted.sort_unstable();
    PartitioningSet::from_sorted(deleted, total)
}

/// Runs the heuristic on the reduced instance and lifts the result back.
pub fn heuristic_partition_reduced(g: &WeightedDag) -> PartitioningSet {
    let (r, log) = reduce(g);
    lift_witness(&log, &heuristic_partition(&r)).expect("heuristic output uses reduced arcs only")
}
