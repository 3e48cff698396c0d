use serde::Serialize;

use super::AnalysisError;
use crate::graph::GraphMeasures;
use crate::model_io::ConnectomeGraph;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BnnEntry {
    pub name: String,
    pub measures: GraphMeasures,
    pub distance: f64,
}

/// Connectomes ordered by `(C, L)` distance to a query, nearest first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BnnSimilarityReport {
    pub query: GraphMeasures,
    pub ranked: Vec<BnnEntry>,
}

/// Measures of a connectome's undirected presence/absence graph.
pub fn connectome_measures(c: &ConnectomeGraph) -> Result<GraphMeasures, AnalysisError> {
    if c.n < 2 {
        return Err(AnalysisError::TooSmall(c.name.clone()));
    }
    Ok(GraphMeasures::of_binary(&c.to_binary()))
}

/// Sorts by Euclidean distance in the `(C, L)` plane; equal distances fall
/// back to name order.
pub fn rank_by_distance(
    query: GraphMeasures,
    candidates: impl IntoIterator<Item = (String, GraphMeasures)>,
) -> BnnSimilarityReport {
    let mut ranked: Vec<BnnEntry> = candidates
        .into_iter()
        .map(|(name, measures)| BnnEntry {
            distance: query.distance(&measures),
            name,
            measures,
        })
        .collect();
    ranked.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then_with(|| a.name.cmp(&b.name))
    });
    BnnSimilarityReport { query, ranked }
}

pub fn bnn_distance(
    query: GraphMeasures,
    connectomes: &[ConnectomeGraph],
) -> Result<BnnSimilarityReport, AnalysisError> {
    let measured = connectomes
        .iter()
        .map(|c| Ok((c.name.clone(), connectome_measures(c)?)))
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    Ok(rank_by_distance(query, measured))
}
