//! Regenerates the checked-in test fixtures.
//!
//! ```text
//! cargo run -p relgraph --example gen_fixtures -- crates/core/tests/fixtures
//! ```

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relgraph::model_io::{
    layer_tensor_name, write_archive, Family, ModelArchive, ModelMeta, TensorData, TensorRecord,
};

/// Tensor entries are `((i·7 + t·3) mod 11) / 10 − 0.5` for element `i` of
/// the `t`-th tensor, which the byte-level test recomputes.
fn pattern(t: usize, len: usize) -> Vec<f32> {
    (0..len)
        .map(|i| ((i * 7 + t * 3) % 11) as f32 / 10.0 - 0.5)
        .collect()
}

fn vit_tiny_l0() -> ModelArchive {
    let mut meta = ModelMeta::single_stage(Family::Vit, 1, 4, (2, 2));
    meta.has_class_token = true;
    meta.heads = vec![2];
    let mut a = ModelArchive::new(meta);
    let shapes: [(String, Vec<usize>); 5] = [
        ("pos_embed".into(), vec![5, 4]),
        (layer_tensor_name(0, "q_weight"), vec![4, 4]),
        (layer_tensor_name(0, "k_weight"), vec![4, 4]),
        (layer_tensor_name(0, "fc1"), vec![4, 8]),
        (layer_tensor_name(0, "fc2"), vec![8, 4]),
    ];
    for (t, (name, shape)) in shapes.into_iter().enumerate() {
        let len = shape.iter().product();
        a.push(TensorRecord::new(name, shape, TensorData::F32(pattern(t, len))).unwrap())
            .unwrap();
    }
    a
}

/// `y = 2·(x − 0.6)² + 0.1` plus uniform noise in ±0.01, 25 points on [0, 1.2].
fn noisy_u() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let mut out = String::from("x,y\n");
    for i in 0..25 {
        let x = i as f64 * 0.05;
        let y = 2.0 * (x - 0.6).powi(2) + 0.1 + rng.random_range(-0.01..0.01);
        writeln!(out, "{x:.4},{y:.6}").unwrap();
    }
    out
}

/// Two datasets whose accuracy peaks at C = 0.839 and 0.841. Path length is
/// `1.28 + 10·(C − 0.84)`, so the peaks in L sit at 1.27 and 1.29.
fn sweetspot_points() -> String {
    let mut out = String::from("model_id,dataset,measure_c,measure_l,accuracy\n");
    for (dataset, peak, top) in [("cifar100", 0.839, 0.82), ("flowers", 0.841, 0.95)] {
        for m in 0..9 {
            let c = 0.80 + 0.01 * m as f64;
            let l = 1.28 + 10.0 * (c - 0.84);
            let acc = top - 40.0 * (c - peak) * (c - peak);
            writeln!(out, "model{m},{dataset},{c:.4},{l:.4},{acc:.9}").unwrap();
        }
    }
    out
}

fn main() {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "crates/core/tests/fixtures".into());
    let dir = Path::new(&dir);
    write_archive(&vit_tiny_l0(), dir.join("vit_tiny_l0.rga")).unwrap();
    std::fs::write(dir.join("noisy_u.csv"), noisy_u()).unwrap();
    std::fs::write(dir.join("sweetspot_points.csv"), sweetspot_points()).unwrap();
}
