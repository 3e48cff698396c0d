use ndarray::{Array2, Array3};
use rayon::prelude::*;
use serde::Serialize;

use super::{
    affine_graph, canonicalize, compose_layers, expand_relative_bias, metaformer_aggregation,
    mixer_aggregation, swin_aggregation, vit_aggregation, vit_aggregation_per_head, BuildError,
    CanonicalAggregation, ClassTokenPolicy, ComposeOrder, LayerAggregation, WindowLayout,
};
use crate::graph::{graph_measures, DenseGraph, GraphMeasures, Tau};
use crate::model_io::{layer_tensor_name, Family, ValidatedModel};

/// How multi-head attention weights become one logit matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum HeadMode {
    /// Whole `d×d` projections with the model's single scaling dimension.
    #[default]
    Whole,
    /// Per-head slices scaled by `√head_dim`, logits averaged over heads.
    PerHead,
}

impl std::str::FromStr for HeadMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "whole" | "whole-matrix" => Ok(Self::Whole),
            "per-head" => Ok(Self::PerHead),
            _ => Err(format!("expected whole or per-head, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PipelineOptions {
    pub class_token: ClassTokenPolicy,
    pub head_mode: HeadMode,
    pub compose_order: ComposeOrder,
}

impl PipelineOptions {
    /// Drops class tokens so every family lands on 196 nodes.
    pub fn cross_family() -> Self {
        Self {
            class_token: ClassTokenPolicy::Drop,
            ..Self::default()
        }
    }
}

fn tensor3(model: &ValidatedModel, name: &str) -> Array3<f64> {
    let t = model.tensor(name);
    let dims: [usize; 3] = t.shape().try_into().expect("validated rank-3 tensor");
    Array3::from_shape_vec(dims, t.data().to_f64()).expect("validated shape")
}

fn mean_of(mats: impl ExactSizeIterator<Item = Array2<f64>>) -> Array2<f64> {
    let k = mats.len() as f64;
    let mut acc: Option<Array2<f64>> = None;
    for m in mats {
        acc = Some(match acc {
            None => m,
            Some(a) => a + m,
        });
    }
    acc.expect("at least one head") / k
}

fn swin_layer(
    model: &ValidatedModel,
    layer: usize,
    mode: HeadMode,
) -> Result<DenseGraph, BuildError> {
    let info = &model.layers()[layer];
    let window = info.window_size.expect("validated swin layer");
    let bias_name = layer_tensor_name(layer, "rel_pos_bias");
    let bias = if model.tensor(&bias_name).shape().len() == 2 {
        let per_head = expand_relative_bias(model.matrix(&bias_name).view(), window)?;
        mean_of(per_head.into_iter())
    } else {
        let stacked = tensor3(model, &bias_name);
        mean_of(
            stacked
                .outer_iter()
                .map(|m| m.to_owned())
                .collect::<Vec<_>>()
                .into_iter(),
        )
    };
    let masks: Vec<Array2<f64>> = tensor3(model, &layer_tensor_name(layer, "attn_mask"))
        .outer_iter()
        .map(|m| m.to_owned())
        .collect();
    let layout = WindowLayout::shifted_grid(info.grid, window, info.shift_size)?;
    let scale_dim = match mode {
        HeadMode::Whole => info.scale_dim,
        HeadMode::PerHead => info.embed_dim / info.heads,
    };
    swin_aggregation(bias.view(), &masks, &layout, scale_dim)
}

/// Token graph of one layer on its native grid.
pub fn layer_aggregation(
    model: &ValidatedModel,
    layer: usize,
    opts: &PipelineOptions,
) -> Result<LayerAggregation, BuildError> {
    let info = &model.layers()[layer];
    let graph = match model.family() {
        Family::Vit | Family::Deit => {
            let pos = model.matrix("pos_embed");
            let wq = model.layer_matrix(layer, "q_weight");
            let wk = model.layer_matrix(layer, "k_weight");
            match opts.head_mode {
                HeadMode::Whole => {
                    vit_aggregation(pos.view(), wq.view(), wk.view(), info.scale_dim)?
                }
                HeadMode::PerHead => {
                    vit_aggregation_per_head(pos.view(), wq.view(), wk.view(), info.heads)?
                }
            }
        }
        Family::Swin => swin_layer(model, layer, opts.head_mode)?,
        Family::Mixer => mixer_aggregation(
            model.layer_matrix(layer, "token_weight").view(),
            info.scale_dim,
        )?,
        Family::Metaformer => {
            let kernel = model.meta().pool_kernel.expect("validated metaformer");
            metaformer_aggregation(info.grid, kernel)?
        }
    };
    LayerAggregation::new(graph, layer, info.grid, model.has_class_token())
}

/// Channel graph of one layer, scaled by the layer's embedding width.
pub fn layer_affine(model: &ValidatedModel, layer: usize) -> Result<DenseGraph, BuildError> {
    let info = &model.layers()[layer];
    let fc1 = model.layer_matrix(layer, "fc1");
    let fc2 = model.layer_matrix(layer, "fc2");
    affine_graph(fc1.view(), fc2.view(), info.embed_dim)
}

/// Every layer's aggregation graph on the canonical grid, in layer order.
pub fn canonical_layers(
    model: &ValidatedModel,
    opts: &PipelineOptions,
) -> Result<Vec<CanonicalAggregation>, BuildError> {
    (0..model.depth())
        .into_par_iter()
        .map(|l| canonicalize(&layer_aggregation(model, l, opts)?, opts.class_token))
        .collect()
}

/// Product of all canonical layer graphs, row-softmaxed.
pub fn final_aggregation(
    model: &ValidatedModel,
    opts: &PipelineOptions,
) -> Result<DenseGraph, BuildError> {
    compose_layers(&canonical_layers(model, opts)?, opts.compose_order)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerMeasures {
    pub layer: usize,
    pub n_tokens: usize,
    pub n_channels: usize,
    pub aggregation: GraphMeasures,
    pub affine: GraphMeasures,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelMeasures {
    pub layers: Vec<LayerMeasures>,
    /// Mean of the per-layer aggregation measures.
    pub aggregation_mean: GraphMeasures,
    pub affine_mean: GraphMeasures,
}

/// Measures of each layer's canonical aggregation graph and affine graph,
/// without composing layers, plus their means.
pub fn per_layer_measures(
    model: &ValidatedModel,
    tau: Tau,
    opts: &PipelineOptions,
) -> Result<ModelMeasures, BuildError> {
    let layers: Vec<LayerMeasures> = (0..model.depth())
        .into_par_iter()
        .map(|l| {
            let agg = canonicalize(&layer_aggregation(model, l, opts)?, opts.class_token)?;
            let aff = layer_affine(model, l)?;
            Ok(LayerMeasures {
                layer: l,
                n_tokens: agg.graph.n(),
                n_channels: aff.n(),
                aggregation: graph_measures(&agg.graph, tau)?,
                affine: graph_measures(&aff, tau)?,
            })
        })
        .collect::<Result<_, BuildError>>()?;
    let aggregation_mean = GraphMeasures::mean(layers.iter().map(|l| &l.aggregation))
        .expect("validated models have at least one layer");
    let affine_mean = GraphMeasures::mean(layers.iter().map(|l| &l.affine)).expect("non-empty");
    Ok(ModelMeasures {
        layers,
        aggregation_mean,
        affine_mean,
    })
}
