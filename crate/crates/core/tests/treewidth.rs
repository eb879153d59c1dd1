use dagpart::generators::gen_bounded_treewidth;
use dagpart::oracle::enumerate_partial_solutions;
use dagpart::treewidth::{dp_tables, make_nice, solve_treewidth, DEFAULT_WIDTH_CAP};
use dagpart::{solve_minimize, Limits, ReductionMode};

#[test]
fn tables_match_partial_solution_enumeration() {
    let mut entries = 0;
    for seed in 0..40 {
        let width = 2 + seed as usize % 2;
        let (g, td) = gen_bounded_treewidth(6, width, 0.8, 4, seed).unwrap();
        let nice = make_nice(&td).unwrap();
        let tables = dp_tables(&g, &nice);
        for (x, node) in nice.nodes().iter().enumerate() {
            let below = nice.subtree_vertices(x);
            let expected = enumerate_partial_solutions(&g, &node.bag, &below).unwrap();
            let got = tables[x].entries();
            assert_eq!(got, &expected, "seed {seed}, node {x}: {:?}", node.kind);
            assert!(got.keys().all(|p| p.is_well_formed()));
        }
        entries += tables.iter().map(|t| t.len()).sum::<usize>();
    }
    assert!(entries > 1000, "only {entries} table entries checked");
}

#[test]
fn optimum_matches_search() {
    for seed in 0..60 {
        let width = 1 + seed as usize % 3;
        let (g, td) = gen_bounded_treewidth(12, width, 0.7, 5, seed).unwrap();
        let sol = solve_treewidth(&g, &td, 0, DEFAULT_WIDTH_CAP).unwrap();
        let (best, _) = solve_minimize(&g, ReductionMode::InitialReduction, Limits::none());
        assert_eq!(sol.optimum, best.unwrap().total_weight(), "seed {seed}");
    }
}
