//! Dense weighted graphs, row normalization, binarization and the two
//! small-world measures (clustering coefficient and average path length).
//!
//! Every aggregation or affine graph in this crate starts life as a
//! [`DenseGraph`]. Measures are never computed on weights directly: a graph is
//! first thresholded into a symmetric, unweighted [`BinaryGraph`], and the
//! classical undirected measures are taken on that.

mod binary;
mod dense;
mod measures;

pub use binary::{threshold_binarize, BinaryGraph, SymmetrizeRule};
pub use dense::{row_normalize_scaled, softmax_rows, DenseGraph, NodeKind};
pub use measures::{
    average_path_length, clustering_coefficient, diagonal_concat, graph_measures, GraphMeasures,
    PathLength, Tau,
};

use thiserror::Error;

/// Errors raised while constructing or combining dense graphs.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("input contains a non-finite value at ({row}, {col})")]
    NonFiniteInput { row: usize, col: usize },
    #[error("negative weight {value} at ({row}, {col})")]
    NegativeWeight { row: usize, col: usize, value: f64 },
    #[error("adjacency must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("scale dimension must be at least 1")]
    ZeroScale,
    #[error("threshold must be a positive finite number, got {0}")]
    InvalidThreshold(f64),
    #[error("cannot concatenate an empty list of graphs")]
    EmptyList,
}
