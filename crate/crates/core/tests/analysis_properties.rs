mod common;

use common::fixture;
use proptest::prelude::*;
use relgraph::analysis::{
    bnn_distance, connectome_measures, fit_quadratic, linear_correlation, Curvature,
};
use relgraph::graph::GraphMeasures;
use relgraph::model_io::read_connectome;

fn read_xy(name: &str) -> Vec<(f64, f64)> {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let (x, y) = l.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

#[test]
fn noisy_u_recovers_generator_minimum() {
    let fit = fit_quadratic(&read_xy("noisy_u.csv")).unwrap();
    assert_eq!(fit.curvature, Curvature::Min);
    assert!((fit.extremum_x.unwrap() - 0.6).abs() < 0.05);
    assert!(fit.r_squared > 0.99);
}

#[test]
fn fixture_connectomes() {
    let dir = fixture("connectomes");
    let worm = read_connectome(dir.join("toy_worm.txt")).unwrap();
    let m = connectome_measures(&worm).unwrap();
    assert_eq!((m.clustering, m.path_length), (1.0, 1.0));

    let chain = read_connectome(dir.join("chain4.txt")).unwrap();
    let m = connectome_measures(&chain).unwrap();
    // path on 4 nodes: distances 1,1,1,2,2,3 over 6 pairs
    assert_eq!(m.clustering, 0.0);
    assert!((m.path_length - 10.0 / 6.0).abs() < 1e-15);

    let kite = read_connectome(dir.join("kite.txt")).unwrap();
    let m = connectome_measures(&kite).unwrap();
    // hub: 1 of 6 leaf pairs linked; l1, l2: 1 of 1; l3, l4: degree 1
    assert!((m.clustering - (1.0 / 6.0 + 2.0) / 5.0).abs() < 1e-15);

    let report = bnn_distance(GraphMeasures::point(0.5, 1.5), &[chain, kite, worm]).unwrap();
    assert!(report
        .ranked
        .windows(2)
        .all(|w| w[0].distance <= w[1].distance));
    let worm_row = report.ranked.iter().find(|e| e.name == "toy_worm").unwrap();
    assert!((worm_row.distance - 0.5f64.sqrt()).abs() < 1e-12);
}

fn points() -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 4..30).prop_filter(
        "three distinct x",
        |p| {
            let mut xs: Vec<f64> = p.iter().map(|q| q.0).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            xs.len() >= 3
        },
    )
}

proptest! {
    #[test]
    fn exact_parabolas_are_recovered(a in 0.1f64..5.0, neg in any::<bool>(), b in -3.0f64..3.0, c in -3.0f64..3.0) {
        let a = if neg { -a } else { a };
        let pts: Vec<_> = (0..7).map(|i| { let x = -1.5 + 0.5 * i as f64; (x, a * x * x + b * x + c) }).collect();
        let fit = fit_quadratic(&pts).unwrap();
        prop_assert!((fit.a - a).abs() < 1e-9);
        prop_assert!((fit.b - b).abs() < 1e-9);
        prop_assert!((fit.c - c).abs() < 1e-9);
        prop_assert_eq!(fit.curvature, if neg { Curvature::Max } else { Curvature::Min });
    }

    #[test]
    fn residuals_orthogonal_to_design(pts in points()) {
        let fit = fit_quadratic(&pts).unwrap();
        for k in 0..3 {
            let (mut dot, mut scale) = (0.0f64, 0.0f64);
            for &(x, y) in &pts {
                let r = y - fit.eval(x);
                dot += r * x.powi(k);
                scale += (y.abs() + fit.eval(x).abs()) * x.abs().powi(k);
            }
            prop_assert!(dot.abs() <= 1e-8 * scale.max(1.0), "k={} dot={}", k, dot);
        }
    }

    #[test]
    fn fit_ignores_point_order(pts in points(), rot in 0usize..30) {
        let a = fit_quadratic(&pts).unwrap();
        let mut shuffled = pts.clone();
        shuffled.reverse();
        let len = shuffled.len();
        shuffled.rotate_left(rot % len);
        let b = fit_quadratic(&shuffled).unwrap();
        let tol = |u: f64| 1e-9 * (1.0 + u.abs());
        prop_assert!((a.a - b.a).abs() < tol(a.a));
        prop_assert!((a.b - b.b).abs() < tol(a.b));
        prop_assert!((a.c - b.c).abs() < tol(a.c));
    }

    #[test]
    fn correlation_survives_affine_rescaling(pts in points(), s in 0.1f64..10.0, t in -5.0f64..5.0, u in 0.1f64..10.0) {
        let base = match linear_correlation(&pts) { Ok(c) => c, Err(_) => return Ok(()) };
        let moved: Vec<_> = pts.iter().map(|&(x, y)| (s * x + t, u * y - t)).collect();
        let r = linear_correlation(&moved).unwrap().r;
        prop_assert!((r - base.r).abs() < 1e-9);
        let flipped: Vec<_> = pts.iter().map(|&(x, y)| (-x, y)).collect();
        prop_assert!((linear_correlation(&flipped).unwrap().r + base.r).abs() < 1e-9);
        prop_assert!((-1.0..=1.0).contains(&base.r));
    }
}
