mod common;

use netmob_core::{DirectedGraph, GraphError};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_graph() -> impl Strategy<Value = DirectedGraph> {
    (3usize..=7, 0.0f64..0.8, any::<u64>())
        .prop_map(|(n, p, seed)| common::random_graph(n, p, &mut ChaCha8Rng::seed_from_u64(seed)))
}

#[test]
fn construction_contract() {
    assert_eq!(DirectedGraph::from_edge_list(&[], 5).unwrap().edge_count(), 0);
    assert_eq!(DirectedGraph::from_edge_list(&[(0, 1), (0, 1), (1, 2)], 3).unwrap().edge_count(), 2);
    assert!(matches!(DirectedGraph::from_edge_list(&[(0, 0)], 1), Err(GraphError::SelfLoop(0))));
    assert!(DirectedGraph::from_edge_list(&[(0, 3)], 3).is_err());
}

#[test]
fn shared_partner_examples() {
    let g = DirectedGraph::from_edge_list(&[(1, 3), (3, 2)], 4).unwrap();
    assert_eq!(g.shared_partners_otp(1, 2).unwrap(), 1);
    assert_eq!(DirectedGraph::empty(4).shared_partners_otp(0, 1).unwrap(), 0);
    let k3 = DirectedGraph::complete(3);
    for (i, j) in [(0, 1), (1, 0), (2, 0)] {
        assert_eq!(k3.shared_partners_otp(i, j).unwrap(), 1);
    }
    assert!(g.shared_partners_otp(2, 2).is_err());
}

#[test]
fn centralization_examples() {
    let k = 6;
    let mut edges = Vec::new();
    for s in 1..=k {
        edges.push((0, s));
        edges.push((s, 0));
    }
    let star = DirectedGraph::from_edge_list(&edges, k + 1).unwrap();
    assert_eq!(star.degree_centralization().unwrap(), 1.0);
    let cycle = DirectedGraph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0)], 4).unwrap();
    assert_eq!(cycle.degree_centralization().unwrap(), 0.0);
    assert!(DirectedGraph::empty(2).degree_centralization().is_err());

    // n = 1026, total degree 2000 with a maximum of 66
    let n = 1026;
    let mut edges: Vec<(usize, usize)> = (1..=65).map(|s| (s, 0)).collect();
    edges.push((0, 66));
    let mut next = 67;
    while edges.len() < 1000 {
        edges.push((next, next + 1));
        next += 1;
    }
    let g = DirectedGraph::from_edge_list(&edges, n).unwrap();
    assert_eq!(g.total_degrees().iter().sum::<usize>(), 2000);
    assert_eq!(g.total_degrees().iter().max(), Some(&66));
    assert!((g.degree_centralization().unwrap() - 0.0313).abs() < 5e-5);
}

proptest! {
    #[test]
    fn toggle_is_an_involution(g in arb_graph(), i in 0usize..7, j in 0usize..7) {
        let n = g.node_count();
        let (i, j) = (i % n, j % n);
        prop_assume!(i != j);
        let mut h = g.clone();
        h.toggle_edge(i, j).unwrap();
        prop_assert_ne!(&h, &g);
        h.toggle_edge(i, j).unwrap();
        prop_assert_eq!(h, g);
    }

    #[test]
    fn bookkeeping_is_consistent(g in arb_graph()) {
        let n = g.node_count();
        let mut total = 0;
        for i in 0..n {
            prop_assert!(!g.has_edge(i, i));
            for &j in g.out_neighbors(i) {
                prop_assert!(g.in_neighbors(j).contains(&i));
            }
            total += g.out_degree(i);
        }
        prop_assert_eq!(total, g.edge_count());
    }

    #[test]
    fn shared_partners_match_triple_loop(g in arb_graph()) {
        let a = common::adjacency(&g);
        for i in 0..g.node_count() {
            for j in 0..g.node_count() {
                if i != j {
                    prop_assert_eq!(g.shared_partners_otp(i, j).unwrap(), common::otp(&a, i, j));
                }
            }
        }
    }

    #[test]
    fn relabelling_preserves_summaries(g in arb_graph(), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..g.node_count()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let h = g.permuted(&perm);
        prop_assert_eq!(h.edge_count(), g.edge_count());
        prop_assert_eq!(h.degree_histograms(), g.degree_histograms());
        prop_assert_eq!(h.degree_centralization().unwrap(), g.degree_centralization().unwrap());
    }
}
