use ndarray::Array2;
use thiserror::Error;

use super::{layer_tensor_name, Family, ModelArchive, ModelMeta, TensorRecord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("missing tensor {0}")]
    MissingTensor(String),
    #[error("tensor {name} has shape {got:?}, expected {expected:?}")]
    WrongShape {
        name: String,
        expected: Vec<usize>,
        got: Vec<usize>,
    },
    #[error("unknown model family {0:?}")]
    UnknownFamily(String),
    #[error("invalid metadata: {0}")]
    InvalidMeta(String),
}

/// Resolved per-layer geometry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerInfo {
    pub index: usize,
    pub stage: usize,
    /// Spatial token grid `(h, w)`, class token excluded.
    pub grid: (usize, usize),
    pub embed_dim: usize,
    /// Attention heads; 1 for families without attention.
    pub heads: usize,
    /// Swin window edge.
    pub window_size: Option<usize>,
    pub shift_size: usize,
    /// Denominator under the square root in this layer's softmax.
    pub scale_dim: usize,
}

impl LayerInfo {
    pub fn spatial_tokens(&self) -> usize {
        self.grid.0 * self.grid.1
    }
}

/// An archive that every graph builder can consume without a missing-tensor
/// or shape failure.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedModel {
    archive: ModelArchive,
    family: Family,
    layers: Vec<LayerInfo>,
}

impl ValidatedModel {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn meta(&self) -> &ModelMeta {
        &self.archive.meta
    }

    pub fn archive(&self) -> &ModelArchive {
        &self.archive
    }

    pub fn layers(&self) -> &[LayerInfo] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn has_class_token(&self) -> bool {
        self.archive.meta.has_class_token
    }

    pub fn tensor(&self, name: &str) -> &TensorRecord {
        self.archive
            .get(name)
            .unwrap_or_else(|| panic!("validated archive lacks {name}"))
    }

    /// A two-dimensional tensor as `f64`.
    pub fn matrix(&self, name: &str) -> Array2<f64> {
        self.tensor(name)
            .to_matrix()
            .unwrap_or_else(|| panic!("{name} is not a matrix"))
    }

    pub fn layer_matrix(&self, layer: usize, suffix: &str) -> Array2<f64> {
        self.matrix(&layer_tensor_name(layer, suffix))
    }
}

fn invalid(msg: impl Into<String>) -> ValidationError {
    ValidationError::InvalidMeta(msg.into())
}

fn require<'a>(archive: &'a ModelArchive, name: &str) -> Result<&'a TensorRecord, ValidationError> {
    archive
        .get(name)
        .ok_or_else(|| ValidationError::MissingTensor(name.to_string()))
}

fn require_shape<'a>(
    archive: &'a ModelArchive,
    name: &str,
    expected: &[usize],
) -> Result<&'a TensorRecord, ValidationError> {
    let t = require(archive, name)?;
    if t.shape() != expected {
        return Err(ValidationError::WrongShape {
            name: name.to_string(),
            expected: expected.to_vec(),
            got: t.shape().to_vec(),
        });
    }
    Ok(t)
}

fn resolve_layers(meta: &ModelMeta, family: Family) -> Result<Vec<LayerInfo>, ValidationError> {
    if meta.depth == 0 {
        return Err(invalid("depth must be at least 1"));
    }
    let stage_depths = if meta.stage_depths.is_empty() {
        vec![meta.depth]
    } else {
        meta.stage_depths.clone()
    };
    let stages = stage_depths.len();
    if stage_depths.iter().sum::<usize>() != meta.depth {
        return Err(invalid(format!(
            "stage depths {stage_depths:?} do not add up to depth {}",
            meta.depth
        )));
    }
    if meta.embed_dims.len() != stages || meta.token_grids.len() != stages {
        return Err(invalid(format!(
            "expected {stages} entries in embed_dims and token_grids"
        )));
    }
    if meta.embed_dims.contains(&0) || meta.token_grids.iter().any(|&(h, w)| h == 0 || w == 0) {
        return Err(invalid("zero-sized stage"));
    }
    let attention = matches!(family, Family::Vit | Family::Deit | Family::Swin);
    if attention && meta.heads.len() != stages {
        return Err(invalid(format!("expected {stages} head counts")));
    }
    if meta.has_class_token && !family.uses_position_attention() {
        return Err(invalid(format!("{family} models carry no class token")));
    }
    if family.uses_position_attention() && stages != 1 {
        return Err(invalid(format!("{family} models have a single stage")));
    }
    if family == Family::Swin
        && (meta.window_sizes.len() != meta.depth || meta.shift_sizes.len() != meta.depth)
    {
        return Err(invalid(
            "swin needs one window size and one shift per layer",
        ));
    }
    if family == Family::Metaformer {
        match meta.pool_kernel {
            Some(k) if k % 2 == 1 => {}
            Some(k) => return Err(invalid(format!("pool kernel must be odd, got {k}"))),
            None => return Err(invalid("metaformer needs pool_kernel")),
        }
    }
    if meta.head_dim_for_scaling == Some(0) {
        return Err(invalid("head_dim_for_scaling must be positive"));
    }

    let mut layers = Vec::with_capacity(meta.depth);
    for (stage, &count) in stage_depths.iter().enumerate() {
        for _ in 0..count {
            let index = layers.len();
            let heads = if attention { meta.heads[stage] } else { 1 };
            let embed_dim = meta.embed_dims[stage];
            if heads == 0 || !embed_dim.is_multiple_of(heads) {
                return Err(invalid(format!(
                    "layer {index}: {heads} heads do not divide {embed_dim} channels"
                )));
            }
            let grid = meta.token_grids[stage];
            let (window_size, shift_size) = if family == Family::Swin {
                let ws = meta.window_sizes[index];
                if ws == 0 || !grid.0.is_multiple_of(ws) || !grid.1.is_multiple_of(ws) {
                    return Err(invalid(format!(
                        "layer {index}: window {ws} does not tile grid {grid:?}"
                    )));
                }
                (Some(ws), meta.shift_sizes[index])
            } else {
                (None, 0)
            };
            layers.push(LayerInfo {
                index,
                stage,
                grid,
                embed_dim,
                heads,
                window_size,
                shift_size,
                scale_dim: meta.head_dim_for_scaling.unwrap_or(embed_dim),
            });
        }
    }
    Ok(layers)
}

/// Checks that `archive` carries every tensor its family's builders read.
pub fn validate_archive(archive: ModelArchive) -> Result<ValidatedModel, ValidationError> {
    let family: Family = archive
        .meta
        .family
        .parse()
        .map_err(ValidationError::UnknownFamily)?;
    let layers = resolve_layers(&archive.meta, family)?;

    if family.uses_position_attention() {
        let l0 = &layers[0];
        let n_tok = l0.spatial_tokens() + usize::from(archive.meta.has_class_token);
        require_shape(&archive, "pos_embed", &[n_tok, l0.embed_dim])?;
    }

    for layer in &layers {
        let d = layer.embed_dim;
        let name = |suffix| layer_tensor_name(layer.index, suffix);
        match family {
            Family::Vit | Family::Deit => {
                require_shape(&archive, &name("q_weight"), &[d, d])?;
                require_shape(&archive, &name("k_weight"), &[d, d])?;
            }
            Family::Swin => {
                let ws = layer.window_size.expect("swin layers carry a window size");
                let nw = ws * ws;
                let table = (2 * ws - 1) * (2 * ws - 1);
                let bias_name = name("rel_pos_bias");
                let bias = require(&archive, &bias_name)?;
                let ok =
                    bias.shape() == [table, layer.heads] || bias.shape() == [layer.heads, nw, nw];
                if !ok {
                    return Err(ValidationError::WrongShape {
                        name: bias_name,
                        expected: vec![table, layer.heads],
                        got: bias.shape().to_vec(),
                    });
                }
                let windows = (layer.grid.0 / ws) * (layer.grid.1 / ws);
                require_shape(&archive, &name("attn_mask"), &[windows, nw, nw])?;
            }
            Family::Mixer => {
                let n = layer.spatial_tokens();
                require_shape(&archive, &name("token_weight"), &[n, n])?;
            }
            Family::Metaformer => {}
        }
        let fc1 = require(&archive, &name("fc1"))?;
        let hidden = match fc1.shape() {
            [rows, h] if *rows == d => *h,
            got => {
                return Err(ValidationError::WrongShape {
                    name: name("fc1"),
                    expected: vec![d, got.get(1).copied().unwrap_or(0)],
                    got: got.to_vec(),
                })
            }
        };
        require_shape(&archive, &name("fc2"), &[hidden, d])?;
    }

    Ok(ValidatedModel {
        archive,
        family,
        layers,
    })
}
