mod common;

use common::{clustering_oracle, edges_of, oracle_graphs, path_length_oracle, random_adjacency};
use ndarray::Array2;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relgraph::graph::{
    average_path_length, clustering_coefficient, graph_measures, threshold_binarize, BinaryGraph,
    DenseGraph, NodeKind, SymmetrizeRule, Tau,
};

fn to_binary(adj: &[Vec<bool>]) -> BinaryGraph {
    BinaryGraph::from_edges(adj.len(), edges_of(adj))
}

fn check(adj: &[Vec<bool>]) {
    let g = to_binary(adj);
    let c = clustering_coefficient(&g);
    let pl = average_path_length(&g);
    let (l, frac) = path_length_oracle(adj);
    assert!(
        (c - clustering_oracle(adj)).abs() < 1e-12,
        "clustering {c} on {adj:?}"
    );
    if l.is_finite() {
        assert!(
            (pl.mean - l).abs() < 1e-12,
            "path length {} vs {l}",
            pl.mean
        );
    } else {
        assert_eq!(pl.mean, f64::INFINITY);
    }
    assert!((pl.connected_pair_fraction - frac).abs() < 1e-12);
}

#[test]
fn seeded_graphs_match_oracles() {
    for adj in oracle_graphs() {
        check(&adj);
    }
}

#[test]
fn larger_graphs_span_several_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (n, p) in [(65, 0.05), (130, 0.03), (200, 0.1)] {
        check(&random_adjacency(&mut rng, n, p));
    }
}

fn adjacency() -> impl Strategy<Value = Vec<Vec<bool>>> {
    (0usize..24, 0.0f64..1.0, any::<u64>()).prop_map(|(n, p, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_adjacency(&mut rng, n, p)
    })
}

fn dense(max_n: usize) -> impl Strategy<Value = DenseGraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(0.0f64..1.0, n * n).prop_map(move |v| {
            DenseGraph::new(Array2::from_shape_vec((n, n), v).unwrap(), NodeKind::Token).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn measures_match_oracles(adj in adjacency()) {
        check(&adj);
    }

    #[test]
    fn clustering_in_unit_interval(adj in adjacency()) {
        let g = to_binary(&adj);
        let c = clustering_coefficient(&g);
        prop_assert!((0.0..=1.0).contains(&c));
        let pl = average_path_length(&g);
        if pl.mean.is_finite() {
            prop_assert!(pl.mean >= 1.0);
        }
    }

    #[test]
    fn raising_tau_only_removes_edges(g in dense(14), t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        for rule in [SymmetrizeRule::Max, SymmetrizeRule::Mean] {
            let a = threshold_binarize(&g, lo, rule);
            let b = threshold_binarize(&g, hi, rule);
            for (i, j) in b.edges() {
                prop_assert!(a.has_edge(i, j));
            }
        }
    }

    #[test]
    fn binarized_graphs_are_simple(g in dense(14), tau in 0.0f64..1.0) {
        let b = threshold_binarize(&g, tau, SymmetrizeRule::Max);
        for i in 0..b.n() {
            prop_assert!(!b.has_edge(i, i));
            for j in 0..b.n() {
                prop_assert_eq!(b.has_edge(i, j), b.has_edge(j, i));
            }
        }
    }

    #[test]
    fn auto_tau_is_one_over_n(g in dense(10)) {
        let n = g.n() as f64;
        prop_assert_eq!(graph_measures(&g, Tau::Auto).unwrap(), graph_measures(&g, Tau::Fixed(1.0 / n)).unwrap());
    }
}

#[test]
fn complete_and_empty() {
    for n in [2, 3, 10, 64, 65] {
        let k = BinaryGraph::complete(n);
        assert_eq!(clustering_coefficient(&k), if n > 2 { 1.0 } else { 0.0 });
        assert_eq!(average_path_length(&k).mean, 1.0);
        let e = BinaryGraph::empty(n);
        assert_eq!(clustering_coefficient(&e), 0.0);
        assert_eq!(average_path_length(&e).mean, f64::INFINITY);
    }
}
