use rayon::prelude::*;
use serde::Serialize;

use super::AnalysisError;
use crate::builders::{canonical_layers, layer_affine, PipelineOptions};
use crate::graph::{diagonal_concat, graph_measures, GraphMeasures, Tau};
use crate::model_io::ValidatedModel;

/// Measures of one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesRow {
    pub epoch: u64,
    pub aggregation: GraphMeasures,
    pub affine: GraphMeasures,
}

/// Per-checkpoint measures, in input order.
///
/// The aggregation measures come from all canonical layer graphs placed on
/// one block diagonal and thresholded at `1/n_tokens`. The affine measures
/// are per-layer graphs thresholded at `1/embed_dim`, averaged over layers.
/// Every checkpoint must carry the same metadata as the first.
pub fn training_series(
    checkpoints: &[(u64, ValidatedModel)],
    opts: &PipelineOptions,
) -> Result<Vec<SeriesRow>, AnalysisError> {
    if let Some((_, first)) = checkpoints.first() {
        if let Some(i) = checkpoints
            .iter()
            .position(|(_, m)| m.meta() != first.meta())
        {
            return Err(AnalysisError::InconsistentMeta(i));
        }
    }
    checkpoints
        .par_iter()
        .map(|(epoch, model)| checkpoint_row(*epoch, model, opts))
        .collect()
}

fn checkpoint_row(
    epoch: u64,
    model: &ValidatedModel,
    opts: &PipelineOptions,
) -> Result<SeriesRow, AnalysisError> {
    let layers: Vec<_> = canonical_layers(model, opts)?
        .into_iter()
        .map(|c| c.graph)
        .collect();
    let n_tokens = layers[0].n();
    let stacked = diagonal_concat(&layers)?;
    let aggregation = graph_measures(&stacked, Tau::Fixed(1.0 / n_tokens as f64))?;

    let affine = (0..model.depth())
        .map(|l| {
            let g = layer_affine(model, l)?;
            let tau = Tau::Fixed(1.0 / model.layers()[l].embed_dim as f64);
            Ok(graph_measures(&g, tau)?)
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let affine = GraphMeasures::mean(affine.iter()).expect("validated models have layers");
    Ok(SeriesRow {
        epoch,
        aggregation,
        affine,
    })
}
