use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::GraphError;

/// What the nodes of a graph stand for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    /// Spatial tokens; aggregation graphs.
    Token,
    /// Feature channels; affine graphs.
    Channel,
    /// Neurons or brain regions of a connectome.
    Biological,
}

/// Square, non-negative weighted adjacency matrix.
///
/// Entry `(i, j)` is the weight with which node `i` aggregates from node `j`,
/// so a row-normalized graph has rows summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseGraph {
    weights: Array2<f64>,
    kind: NodeKind,
    row_normalized: bool,
}

impl DenseGraph {
    /// Wraps a weight matrix after checking it is square, finite and non-negative.
    pub fn new(weights: Array2<f64>, kind: NodeKind) -> Result<Self, GraphError> {
        let (rows, cols) = weights.dim();
        if rows != cols {
            return Err(GraphError::NotSquare { rows, cols });
        }
        for ((row, col), &value) in weights.indexed_iter() {
            if !value.is_finite() {
                return Err(GraphError::NonFiniteInput { row, col });
            }
            if value < 0.0 {
                return Err(GraphError::NegativeWeight { row, col, value });
            }
        }
        Ok(Self {
            weights,
            kind,
            row_normalized: false,
        })
    }

    /// Builds a graph from a closure over `(row, col)`.
    pub fn from_fn(
        n: usize,
        kind: NodeKind,
        f: impl FnMut((usize, usize)) -> f64,
    ) -> Result<Self, GraphError> {
        Self::new(Array2::from_shape_fn((n, n), f), kind)
    }

    /// Every entry equal to `1/n`.
    pub fn uniform(n: usize, kind: NodeKind) -> Self {
        let value = if n == 0 { 0.0 } else { 1.0 / n as f64 };
        Self {
            weights: Array2::from_elem((n, n), value),
            kind,
            row_normalized: n > 0,
        }
    }

    pub fn identity(n: usize, kind: NodeKind) -> Self {
        Self {
            weights: Array2::eye(n),
            kind,
            row_normalized: true,
        }
    }

    /// Skips validation. Callers guarantee finiteness and non-negativity.
    pub(crate) fn from_parts(weights: Array2<f64>, kind: NodeKind, row_normalized: bool) -> Self {
        debug_assert_eq!(weights.nrows(), weights.ncols());
        Self {
            weights,
            kind,
            row_normalized,
        }
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    /// True when the graph was produced by a row-wise softmax.
    pub fn is_row_normalized(&self) -> bool {
        self.row_normalized
    }

    pub fn weights(&self) -> ArrayView2<'_, f64> {
        self.weights.view()
    }

    pub fn into_weights(self) -> Array2<f64> {
        self.weights
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.weights[(row, col)]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.weights.sum_axis(Axis(1)).to_vec()
    }

    /// Relabels the node semantics without touching the weights.
    pub fn with_kind(mut self, kind: NodeKind) -> Self {
        self.kind = kind;
        self
    }
}

/// Row-wise softmax of `raw / divisor`, with each row shifted by its maximum.
///
/// Returns the normalized matrix; callers wrap it into a [`DenseGraph`].
pub fn softmax_rows(raw: ArrayView2<'_, f64>, divisor: f64) -> Result<Array2<f64>, GraphError> {
    let (rows, cols) = raw.dim();
    if rows != cols {
        return Err(GraphError::NotSquare { rows, cols });
    }
    if let Some(((row, col), _)) = raw.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(GraphError::NonFiniteInput { row, col });
    }
    let mut out = raw.mapv(|v| v / divisor);
    for mut row in out.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let total: f64 = row.sum();
        row.mapv_inplace(|v| v / total);
    }
    Ok(out)
}

/// `out[i][j] = exp(raw[i][j]/√d) / Σ_k exp(raw[i][k]/√d)`.
///
/// The resulting graph has [`NodeKind::Token`] semantics; use
/// [`DenseGraph::with_kind`] to relabel.
///
/// ```
/// use ndarray::array;
/// use relgraph::graph::row_normalize_scaled;
///
/// let g = row_normalize_scaled(array![[1.0, 0.0], [0.0, 0.0]].view(), 1).unwrap();
/// assert!((g.get(0, 0) - 0.7310585786300049).abs() < 1e-12);
/// assert_eq!(g.get(1, 1), 0.5);
/// ```
pub fn row_normalize_scaled(
    raw: ArrayView2<'_, f64>,
    scale_dim: usize,
) -> Result<DenseGraph, GraphError> {
    if scale_dim == 0 {
        return Err(GraphError::ZeroScale);
    }
    let weights = softmax_rows(raw, (scale_dim as f64).sqrt())?;
    Ok(DenseGraph::from_parts(weights, NodeKind::Token, true))
}
