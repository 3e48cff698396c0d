//! Seeded in-memory archives for each family.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relgraph::model_io::{
    layer_tensor_name, validate_archive, Family, ModelArchive, ModelMeta, TensorData, TensorRecord,
    ValidatedModel,
};

fn random(rng: &mut ChaCha8Rng, name: String, shape: &[usize], scale: f32) -> TensorRecord {
    let n = shape.iter().product();
    let data = (0..n).map(|_| rng.random_range(-scale..scale)).collect();
    TensorRecord::new(name, shape.to_vec(), TensorData::F32(data)).unwrap()
}

fn push_mlp(a: &mut ModelArchive, rng: &mut ChaCha8Rng, layer: usize, d: usize, hidden: usize) {
    a.push(random(
        rng,
        layer_tensor_name(layer, "fc1"),
        &[d, hidden],
        0.2,
    ))
    .unwrap();
    a.push(random(
        rng,
        layer_tensor_name(layer, "fc2"),
        &[hidden, d],
        0.2,
    ))
    .unwrap();
}

/// ViT with a class token on a `grid×grid` patch grid.
pub fn vit(seed: u64, depth: usize, d: usize, grid: usize) -> ModelArchive {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut meta = ModelMeta::single_stage(Family::Vit, depth, d, (grid, grid));
    meta.has_class_token = true;
    meta.heads = vec![if d.is_multiple_of(3) { 3 } else { 2 }];
    let mut a = ModelArchive::new(meta);
    a.push(random(
        &mut rng,
        "pos_embed".into(),
        &[grid * grid + 1, d],
        0.5,
    ))
    .unwrap();
    for l in 0..depth {
        a.push(random(
            &mut rng,
            layer_tensor_name(l, "q_weight"),
            &[d, d],
            0.3,
        ))
        .unwrap();
        a.push(random(
            &mut rng,
            layer_tensor_name(l, "k_weight"),
            &[d, d],
            0.3,
        ))
        .unwrap();
        push_mlp(&mut a, &mut rng, l, d, 4 * d);
    }
    a
}

/// ViT-Tiny shapes: 14×14 patches plus a class token, 192 channels, 3 heads.
pub fn vit_tiny(seed: u64, depth: usize) -> ModelArchive {
    vit(seed, depth, 192, 14)
}

/// Single-stage Swin on a 28×28 grid with 7×7 windows, alternating shifts.
pub fn swin(seed: u64, depth: usize) -> ModelArchive {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (grid, w, d, heads) = (28, 7, 8, 2);
    let mut meta = ModelMeta::single_stage(Family::Swin, depth, d, (grid, grid));
    meta.heads = vec![heads];
    meta.window_sizes = vec![w; depth];
    meta.shift_sizes = (0..depth).map(|l| if l % 2 == 1 { 3 } else { 0 }).collect();
    let mut a = ModelArchive::new(meta);
    let windows = (grid / w) * (grid / w);
    for l in 0..depth {
        a.push(random(
            &mut rng,
            layer_tensor_name(l, "rel_pos_bias"),
            &[(2 * w - 1).pow(2), heads],
            2.0,
        ))
        .unwrap();
        let mask = if l % 2 == 1 {
            random(
                &mut rng,
                layer_tensor_name(l, "attn_mask"),
                &[windows, w * w, w * w],
                1.0,
            )
        } else {
            let n = windows * w * w * w * w;
            TensorRecord::new(
                layer_tensor_name(l, "attn_mask"),
                vec![windows, w * w, w * w],
                TensorData::F32(vec![0.0; n]),
            )
            .unwrap()
        };
        a.push(mask).unwrap();
        push_mlp(&mut a, &mut rng, l, d, 4 * d);
    }
    a
}

/// Mixer on a 7×7 grid, upsampled to the canonical grid.
pub fn mixer(seed: u64, depth: usize) -> ModelArchive {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 6;
    let mut a = ModelArchive::new(ModelMeta::single_stage(Family::Mixer, depth, d, (7, 7)));
    for l in 0..depth {
        a.push(random(
            &mut rng,
            layer_tensor_name(l, "token_weight"),
            &[49, 49],
            3.0,
        ))
        .unwrap();
        push_mlp(&mut a, &mut rng, l, d, 4 * d);
    }
    a
}

/// Pooling MetaFormer on 14×14; only the channel MLPs carry weights.
pub fn metaformer(seed: u64, depth: usize, kernel: usize) -> ModelArchive {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 8;
    let mut meta = ModelMeta::single_stage(Family::Metaformer, depth, d, (14, 14));
    meta.pool_kernel = Some(kernel);
    let mut a = ModelArchive::new(meta);
    for l in 0..depth {
        push_mlp(&mut a, &mut rng, l, d, 4 * d);
    }
    a
}

pub fn validated(a: ModelArchive) -> ValidatedModel {
    validate_archive(a).expect("generated archives validate")
}
