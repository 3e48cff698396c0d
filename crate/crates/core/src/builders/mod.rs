//! Aggregation and affine graph construction.
//!
//! Each family's token mixer is reduced to one token-by-token matrix per
//! layer:
//!
//! | family        | aggregation graph                               |
//! |---------------|-------------------------------------------------|
//! | ViT / DeiT    | `softmax(P·Wq·Wkᵀ·Pᵀ / √dim)`                   |
//! | Swin          | per window `softmax(I/√dim + B + Mask)`          |
//! | Mixer         | `softmax(Wᵀ / √dim)`                            |
//! | MetaFormer    | `1/K²` over the in-grid `K×K` neighbourhood      |
//!
//! and every channel MLP to the affine graph `softmax(W1·W2 / √dim)`.
//! Layers are then resampled onto the canonical 14×14 grid (plus an optional
//! class token) and multiplied together.

mod compose;
mod families;
mod pipeline;
mod resample;

pub use compose::{compose_layers, ComposeOrder};
pub use families::{
    affine_graph, expand_relative_bias, metaformer_aggregation, mixer_aggregation,
    swin_aggregation, vit_aggregation, vit_aggregation_per_head, WindowLayout,
};
pub use pipeline::{
    canonical_layers, final_aggregation, layer_affine, layer_aggregation, per_layer_measures,
    HeadMode, LayerMeasures, ModelMeasures, PipelineOptions,
};
pub use resample::{canonicalize, downsample, upsample, CANONICAL_GRID};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DenseGraph, GraphError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("bad window assignment: {0}")]
    BadWindowAssignment(String),
    #[error("pooling kernel must be odd and positive, got {0}")]
    BadKernel(usize),
    #[error("grid {grid:?} is not divisible by {factor}")]
    IndivisibleGrid { grid: (usize, usize), factor: usize },
    #[error("grid {0:?} cannot be resampled onto 14x14 by an integer factor")]
    IncompatibleGrid((usize, usize)),
    #[error("layers disagree on node count or class-token handling")]
    MixedSizes,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// What happens to a class token during canonicalization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassTokenPolicy {
    /// Keep an existing class token (node 0).
    #[default]
    Keep,
    /// Remove the class token's row and column.
    Drop,
    /// Keep an existing class token, or add one with uniform outgoing weights.
    Pad,
}

impl std::str::FromStr for ClassTokenPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "keep" => Ok(Self::Keep),
            "drop" => Ok(Self::Drop),
            "pad" => Ok(Self::Pad),
            _ => Err(format!("expected keep, drop or pad, got {s:?}")),
        }
    }
}

/// Class-token state of a canonical graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassToken {
    /// The source had no class token and none was added.
    Absent,
    Kept,
    Dropped,
    Padded,
}

impl ClassToken {
    pub fn present(self) -> bool {
        matches!(self, ClassToken::Kept | ClassToken::Padded)
    }
}

/// One layer's token graph on its native grid.
///
/// When `has_class_token` is set, node 0 is the class token and nodes
/// `1..=h·w` are the spatial tokens in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerAggregation {
    pub graph: DenseGraph,
    pub layer_index: usize,
    pub source_grid: (usize, usize),
    pub has_class_token: bool,
}

impl LayerAggregation {
    pub fn new(
        graph: DenseGraph,
        layer_index: usize,
        source_grid: (usize, usize),
        has_class_token: bool,
    ) -> Result<Self, BuildError> {
        let expected = source_grid.0 * source_grid.1 + usize::from(has_class_token);
        if graph.n() != expected {
            return Err(BuildError::ShapeMismatch(format!(
                "graph has {} nodes, grid {source_grid:?} needs {expected}",
                graph.n()
            )));
        }
        Ok(Self {
            graph,
            layer_index,
            source_grid,
            has_class_token,
        })
    }
}

/// A layer graph resampled to 196 or 197 nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalAggregation {
    pub graph: DenseGraph,
    pub layer_index: usize,
    pub class_token: ClassToken,
}
