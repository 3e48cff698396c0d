//! Relating graph measures to accuracy and to biological networks.

mod bnn;
mod correlation;
mod regression;
mod series;

pub use bnn::{bnn_distance, connectome_measures, rank_by_distance, BnnEntry, BnnSimilarityReport};
pub use correlation::{linear_correlation, Correlation};
pub use regression::{fit_quadratic, sweet_spot, Curvature, MeasureName, QuadraticFit, SweetSpot};
pub use series::{training_series, SeriesRow};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builders::BuildError;
use crate::graph::GraphError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("fewer than three distinct x values")]
    RankDeficient,
    #[error("fit for {0} has no curvature")]
    DegenerateFit(String),
    #[error("need fits from at least two datasets, got {0}")]
    TooFewDatasets(usize),
    #[error("series has zero variance")]
    ConstantSeries,
    #[error("connectome {0} has fewer than two nodes")]
    TooSmall(String),
    #[error("checkpoint {0} has different metadata from the first checkpoint")]
    InconsistentMeta(usize),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One model evaluated on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurePoint {
    pub model_id: String,
    pub dataset: String,
    pub measure_c: f64,
    pub measure_l: f64,
    /// Top-1 accuracy in `[0, 1]`.
    pub accuracy: f64,
    #[serde(default)]
    pub params_millions: Option<f64>,
}
