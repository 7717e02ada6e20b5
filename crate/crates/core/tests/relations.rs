mod common;

use proptest::prelude::*;

use stemos::spatial::{ObjectGraph, PredicateParams, Relation};

fn check(seed: u64, max_nodes: usize, len: usize) -> Result<(), TestCaseError> {
    let params = PredicateParams::default();
    let mut g = ObjectGraph::new();
    for op in common::graph_ops(seed, max_nodes, len, &params) {
        common::apply_op(&mut g, &op, &params);
        prop_assert_eq!(common::edge_set(&g), common::brute_force_edges(&g, &params), "after {:?}", op);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incremental_edges_equal_all_pairs_evaluation(seed in any::<u64>(), max_nodes in 1usize..=15, len in 1usize..60) {
        check(seed, max_nodes, len)?;
    }

    #[test]
    fn dual_edges_coexist(seed in any::<u64>()) {
        let params = PredicateParams::default();
        let mut g = ObjectGraph::new();
        for op in common::graph_ops(seed, 12, 40, &params) {
            common::apply_op(&mut g, &op, &params);
        }
        for e in &g.edges {
            if let Some(d) = e.relation.dual() {
                prop_assert!(g.edges.iter().any(|f| f.relation == d && f.subject == e.object && f.object == e.subject));
            }
            if matches!(e.relation, Relation::On | Relation::In) {
                prop_assert!(!g.edges.iter().any(|f| f.relation == e.relation && f.subject == e.object && f.object == e.subject));
            }
        }
    }
}

#[test]
fn stacks_and_nesting_show_up() {
    // The generator has to reach ON and IN at all for the oracle test to mean much.
    let params = PredicateParams::default();
    let mut seen = std::collections::BTreeSet::new();
    for seed in 0..200 {
        let mut g = ObjectGraph::new();
        for op in common::graph_ops(seed, 15, 30, &params) {
            common::apply_op(&mut g, &op, &params);
            seen.extend(g.edges.iter().map(|e| e.relation));
        }
    }
    assert_eq!(seen.len(), Relation::ALL.len(), "{seen:?}");
}
