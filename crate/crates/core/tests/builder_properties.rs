mod common;

use ndarray::Array2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relgraph::builders::{
    affine_graph, canonicalize, compose_layers, downsample, expand_relative_bias,
    metaformer_aggregation, mixer_aggregation, swin_aggregation, upsample, vit_aggregation,
    vit_aggregation_per_head, ClassTokenPolicy, ComposeOrder, LayerAggregation, WindowLayout,
};
use relgraph::graph::{softmax_rows, DenseGraph, NodeKind};

fn matrix(rng: &mut ChaCha8Rng, r: usize, c: usize, scale: f64) -> Array2<f64> {
    Array2::from_shape_fn((r, c), |_| rng.random_range(-scale..scale))
}

fn assert_stochastic(g: &DenseGraph) {
    for (i, s) in g.row_sums().into_iter().enumerate() {
        assert!((s - 1.0).abs() < 1e-6, "row {i} sums to {s}");
    }
}

#[test]
fn softmax_builders_are_row_stochastic() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let n = rng.random_range(2..20);
        let d = 2 * rng.random_range(1..6);
        let p = matrix(&mut rng, n, d, 3.0);
        let (wq, wk) = (matrix(&mut rng, d, d, 2.0), matrix(&mut rng, d, d, 2.0));
        assert_stochastic(&vit_aggregation(p.view(), wq.view(), wk.view(), d).unwrap());
        assert_stochastic(&vit_aggregation_per_head(p.view(), wq.view(), wk.view(), 2).unwrap());
        assert_stochastic(&mixer_aggregation(matrix(&mut rng, n, n, 50.0).view(), d).unwrap());
        let h = rng.random_range(1..16);
        let fc1 = matrix(&mut rng, d, h, 1.0);
        let fc2 = matrix(&mut rng, h, d, 1.0);
        assert_stochastic(&affine_graph(fc1.view(), fc2.view(), d).unwrap());

        let layout = WindowLayout::shifted_grid((6, 6), 3, rng.random_range(0..3)).unwrap();
        let table = matrix(&mut rng, 25, 2, 5.0);
        let bias = expand_relative_bias(table.view(), 3).unwrap().remove(1);
        let masks: Vec<_> = (0..4).map(|_| matrix(&mut rng, 9, 9, 100.0)).collect();
        assert_stochastic(&swin_aggregation(bias.view(), &masks, &layout, d).unwrap());
    }
}

#[test]
fn metaformer_rows_count_in_grid_neighbours() {
    for (h, w, k) in [(14, 14, 3), (14, 14, 5), (7, 9, 3), (1, 5, 3), (4, 4, 1)] {
        let g = metaformer_aggregation((h, w), k).unwrap();
        let half = (k / 2) as i64;
        for i in 0..h * w {
            let (r, c) = ((i / w) as i64, (i % w) as i64);
            let rows = (r - half).max(0)..=(r + half).min(h as i64 - 1);
            let cols = (c - half).max(0)..=(c + half).min(w as i64 - 1);
            let count = rows.count() * cols.count();
            let row = g.weights().row(i).to_owned();
            let nonzero: Vec<f64> = row.iter().copied().filter(|&v| v != 0.0).collect();
            assert_eq!(nonzero.len(), count);
            assert!(nonzero.iter().all(|&v| v == 1.0 / (k * k) as f64));
            assert!((row.sum() - count as f64 / (k * k) as f64).abs() < 1e-15);
        }
    }
}

#[test]
fn composed_graphs_are_row_stochastic() {
    let models = [
        common::models::vit(5, 3, 6, 7),
        common::models::mixer(6, 3),
        common::models::swin(7, 2),
    ];
    for a in models {
        let m = common::models::validated(a);
        for policy in [ClassTokenPolicy::Keep, ClassTokenPolicy::Drop] {
            let opts = relgraph::builders::PipelineOptions {
                class_token: policy,
                ..Default::default()
            };
            let layers = relgraph::builders::canonical_layers(&m, &opts).unwrap();
            for order in [ComposeOrder::Forward, ComposeOrder::Reverse] {
                assert_stochastic(&compose_layers(&layers, order).unwrap());
            }
        }
    }
}

fn uniform_layer(grid: usize, cls: bool, v: f64) -> LayerAggregation {
    let n = grid * grid + usize::from(cls);
    let g = DenseGraph::new(Array2::from_elem((n, n), v), NodeKind::Token).unwrap();
    LayerAggregation::new(g, 0, (grid, grid), cls).unwrap()
}

#[test]
fn resampling_closed_forms() {
    let down = downsample(&uniform_layer(28, false, 1.0 / 196.0), 2).unwrap();
    assert_eq!(down.source_grid, (14, 14));
    for v in down.graph.weights().iter() {
        assert!((v - 8.0 / 196.0).abs() < 1e-12);
    }
    let up = upsample(&uniform_layer(7, false, 1.0 / 49.0), 2).unwrap();
    for v in up.graph.weights().iter() {
        assert!((v - 1.0 / 98.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn softmax_ignores_row_shifts(seed in any::<u64>(), n in 1usize..12, divisor in 0.5f64..20.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = matrix(&mut rng, n, n, 10.0);
        let mut shifted = a.clone();
        for mut row in shifted.rows_mut() {
            let c = rng.random_range(-1e3..1e3);
            row.mapv_inplace(|v| v + c);
        }
        let x = softmax_rows(a.view(), divisor).unwrap();
        let y = softmax_rows(shifted.view(), divisor).unwrap();
        for (p, q) in x.iter().zip(y.iter()) {
            prop_assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn one_head_matches_whole_matrix(seed in any::<u64>(), n in 1usize..10, d in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = matrix(&mut rng, n, d, 2.0);
        let (wq, wk) = (matrix(&mut rng, d, d, 1.0), matrix(&mut rng, d, d, 1.0));
        let a = vit_aggregation(p.view(), wq.view(), wk.view(), d).unwrap();
        let b = vit_aggregation_per_head(p.view(), wq.view(), wk.view(), 1).unwrap();
        for (x, y) in a.weights().iter().zip(b.weights().iter()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn down_of_up_scales_by_k_squared(seed in any::<u64>(), k in 2usize..4, cls in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = if k == 2 { 7 } else { 3 };
        let n = grid * grid + usize::from(cls);
        let w = Array2::from_shape_fn((n, n), |_| rng.random_range(0.0..1.0));
        let g = LayerAggregation::new(DenseGraph::new(w.clone(), NodeKind::Token).unwrap(), 0, (grid, grid), cls).unwrap();
        let round = downsample(&upsample(&g, k).unwrap(), k).unwrap();
        let k2 = (k * k) as f64;
        let offset = usize::from(cls);
        for i in offset..n {
            for j in offset..n {
                prop_assert!((round.graph.get(i, j) - k2 * w[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn canonical_graphs_have_196_or_197_nodes(grid_pow in 0usize..3, cls in any::<bool>(), policy in 0u8..3) {
        let grid = [7, 14, 28][grid_pow];
        let policy = [ClassTokenPolicy::Keep, ClassTokenPolicy::Drop, ClassTokenPolicy::Pad][policy as usize];
        let g = uniform_layer(grid, cls, 0.5);
        let c = canonicalize(&g, policy).unwrap();
        let expected = match policy {
            ClassTokenPolicy::Keep => 196 + usize::from(cls),
            ClassTokenPolicy::Drop => 196,
            ClassTokenPolicy::Pad => 197,
        };
        prop_assert_eq!(c.graph.n(), expected);
    }
}
