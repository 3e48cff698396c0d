use ndarray::{s, Array1, Array2};

use super::{BuildError, CanonicalAggregation, ClassToken, ClassTokenPolicy, LayerAggregation};
use crate::graph::{DenseGraph, NodeKind};

/// Edge of the canonical token grid.
pub const CANONICAL_GRID: usize = 14;

/// Class-token row/column held aside while the spatial block is resampled.
struct ClassParts {
    self_weight: f64,
    /// class token -> spatial node
    row: Array1<f64>,
    /// spatial node -> class token
    col: Array1<f64>,
}

fn split(g: &LayerAggregation) -> (Array2<f64>, Option<ClassParts>) {
    let w = g.graph.weights();
    if !g.has_class_token {
        return (w.to_owned(), None);
    }
    let parts = ClassParts {
        self_weight: w[(0, 0)],
        row: w.slice(s![0, 1..]).to_owned(),
        col: w.slice(s![1.., 0]).to_owned(),
    };
    (w.slice(s![1.., 1..]).to_owned(), Some(parts))
}

fn join(spatial: Array2<f64>, class: Option<ClassParts>) -> Array2<f64> {
    let Some(c) = class else { return spatial };
    let n = spatial.nrows() + 1;
    let mut out = Array2::zeros((n, n));
    out[(0, 0)] = c.self_weight;
    out.slice_mut(s![0, 1..]).assign(&c.row);
    out.slice_mut(s![1.., 0]).assign(&c.col);
    out.slice_mut(s![1.., 1..]).assign(&spatial);
    out
}

/// Index of the coarse node that fine node `i` of an `(h, w)` grid falls in.
fn coarse_index(i: usize, w: usize, k: usize) -> usize {
    let (r, c) = (i / w, i % w);
    (r / k) * (w / k) + c / k
}

/// Coarsens the spatial grid by `k` along both axes.
///
/// Target nodes `x` and `y` own the `k×k` source blocks `Ner(x)` and
/// `Ner(y)`; the new weight is `1/k · Σ_{i∈Ner(x)} Σ_{j∈Ner(y)} A[i][j]`.
/// A class token's outgoing weights are summed over each block and its
/// incoming weights averaged.
pub fn downsample(g: &LayerAggregation, k: usize) -> Result<LayerAggregation, BuildError> {
    let (h, w) = g.source_grid;
    if k == 0 || h % k != 0 || w % k != 0 {
        return Err(BuildError::IndivisibleGrid {
            grid: g.source_grid,
            factor: k,
        });
    }
    if k == 1 {
        return Ok(g.clone());
    }
    let (spatial, class) = split(g);
    let m = (h / k) * (w / k);
    let coarse: Vec<usize> = (0..h * w).map(|i| coarse_index(i, w, k)).collect();

    let mut out = Array2::<f64>::zeros((m, m));
    for (i, row) in spatial.rows().into_iter().enumerate() {
        let x = coarse[i];
        for (j, &v) in row.iter().enumerate() {
            out[(x, coarse[j])] += v;
        }
    }
    out.mapv_inplace(|v| v / k as f64);

    let class = class.map(|c| {
        let mut row = Array1::zeros(m);
        let mut col = Array1::zeros(m);
        for (i, &x) in coarse.iter().enumerate() {
            row[x] += c.row[i];
            col[x] += c.col[i];
        }
        col.mapv_inplace(|v| v / (k * k) as f64);
        ClassParts {
            self_weight: c.self_weight,
            row,
            col,
        }
    });
    let graph = DenseGraph::from_parts(join(out, class), NodeKind::Token, false);
    LayerAggregation::new(graph, g.layer_index, (h / k, w / k), g.has_class_token)
}

/// Refines the spatial grid by `k`: fine entry `(x, y)` takes
/// `A[x//k][y//k] / k`, with `//k` applied to grid coordinates. A class
/// token's outgoing weights are split evenly over each block and its incoming
/// weights copied.
pub fn upsample(g: &LayerAggregation, k: usize) -> Result<LayerAggregation, BuildError> {
    if k == 0 {
        return Err(BuildError::IndivisibleGrid {
            grid: g.source_grid,
            factor: k,
        });
    }
    if k == 1 {
        return Ok(g.clone());
    }
    let (h, w) = g.source_grid;
    let (fh, fw) = (h * k, w * k);
    let (spatial, class) = split(g);
    let coarse: Vec<usize> = (0..fh * fw).map(|i| coarse_index(i, fw, k)).collect();
    let scale = 1.0 / k as f64;
    let out = Array2::from_shape_fn((fh * fw, fh * fw), |(x, y)| {
        spatial[(coarse[x], coarse[y])] * scale
    });
    let class = class.map(|c| {
        let split_share = 1.0 / (k * k) as f64;
        ClassParts {
            self_weight: c.self_weight,
            row: coarse.iter().map(|&x| c.row[x] * split_share).collect(),
            col: coarse.iter().map(|&x| c.col[x]).collect(),
        }
    });
    let graph = DenseGraph::from_parts(join(out, class), NodeKind::Token, false);
    LayerAggregation::new(graph, g.layer_index, (fh, fw), g.has_class_token)
}

enum Resample {
    Keep,
    Down(usize),
    Up(usize),
}

fn plan(grid: (usize, usize)) -> Result<Resample, BuildError> {
    let axis = |e: usize| match e {
        CANONICAL_GRID => Some((0, 1)),
        e if e > CANONICAL_GRID && e % CANONICAL_GRID == 0 => Some((1, e / CANONICAL_GRID)),
        e if e > 0 && e < CANONICAL_GRID && CANONICAL_GRID.is_multiple_of(e) => {
            Some((2, CANONICAL_GRID / e))
        }
        _ => None,
    };
    match (axis(grid.0), axis(grid.1)) {
        (Some(a), Some(b)) if a == b => Ok(match a {
            (0, _) => Resample::Keep,
            (1, k) => Resample::Down(k),
            (_, k) => Resample::Up(k),
        }),
        _ => Err(BuildError::IncompatibleGrid(grid)),
    }
}

/// Resamples a layer onto the 14×14 grid and applies the class-token policy.
///
/// The output always has 196 nodes, or 197 with the class token at node 0.
pub fn canonicalize(
    g: &LayerAggregation,
    policy: ClassTokenPolicy,
) -> Result<CanonicalAggregation, BuildError> {
    let resampled = match plan(g.source_grid)? {
        Resample::Keep => g.clone(),
        Resample::Down(k) => downsample(g, k)?,
        Resample::Up(k) => upsample(g, k)?,
    };
    let normalized = resampled.graph.is_row_normalized();
    let spatial = CANONICAL_GRID * CANONICAL_GRID;
    let (weights, class_token) = match (policy, g.has_class_token) {
        (ClassTokenPolicy::Keep | ClassTokenPolicy::Pad, true) => {
            (resampled.graph.into_weights(), ClassToken::Kept)
        }
        (ClassTokenPolicy::Keep, false) => (resampled.graph.into_weights(), ClassToken::Absent),
        (ClassTokenPolicy::Drop, true) => (
            resampled.graph.weights().slice(s![1.., 1..]).to_owned(),
            ClassToken::Dropped,
        ),
        (ClassTokenPolicy::Drop, false) => (resampled.graph.into_weights(), ClassToken::Absent),
        (ClassTokenPolicy::Pad, false) => {
            let n = spatial + 1;
            let mut padded = Array2::zeros((n, n));
            padded.row_mut(0).fill(1.0 / n as f64);
            padded
                .slice_mut(s![1.., 1..])
                .assign(&resampled.graph.weights());
            (padded, ClassToken::Padded)
        }
    };
    let keeps_normalization =
        normalized && class_token != ClassToken::Dropped && class_token != ClassToken::Padded;
    Ok(CanonicalAggregation {
        graph: DenseGraph::from_parts(weights, NodeKind::Token, keeps_normalization),
        layer_index: g.layer_index,
        class_token,
    })
}
