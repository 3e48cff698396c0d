use ndarray::{s, Array2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{threshold_binarize, BinaryGraph, DenseGraph, GraphError, SymmetrizeRule};

/// Edge threshold for binarization.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum Tau {
    /// `1/n` for an `n`-node graph: the weight every node would receive under
    /// a uniform row.
    #[default]
    Auto,
    Fixed(f64),
}

impl Tau {
    pub fn resolve(self, n: usize) -> f64 {
        match self {
            Tau::Auto => 1.0 / n.max(1) as f64,
            Tau::Fixed(t) => t,
        }
    }
}

impl std::str::FromStr for Tau {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Tau::Auto);
        }
        match s.parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(Tau::Fixed(t)),
            _ => Err(format!("expected \"auto\" or a positive number, got {s:?}")),
        }
    }
}

/// Mean shortest-path length over connected ordered pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLength {
    /// `f64::INFINITY` when no pair is connected.
    pub mean: f64,
    /// Connected ordered pairs divided by `n(n-1)`.
    pub connected_pair_fraction: f64,
}

/// Clustering coefficient `C` and average path length `L` of one graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphMeasures {
    pub clustering: f64,
    /// Infinite when the thresholded graph has no edges.
    pub path_length: f64,
    pub connected_pair_fraction: f64,
}

impl GraphMeasures {
    pub fn of_binary(g: &BinaryGraph) -> Self {
        let path = average_path_length(g);
        Self {
            clustering: clustering_coefficient(g),
            path_length: path.mean,
            connected_pair_fraction: path.connected_pair_fraction,
        }
    }

    /// Point with the given coordinates and full connectivity; handy for queries.
    pub fn point(clustering: f64, path_length: f64) -> Self {
        Self {
            clustering,
            path_length,
            connected_pair_fraction: 1.0,
        }
    }

    pub fn has_connected_pairs(&self) -> bool {
        self.path_length.is_finite()
    }

    /// Euclidean distance in the `(C, L)` plane.
    pub fn distance(&self, other: &GraphMeasures) -> f64 {
        (self.clustering - other.clustering).hypot(self.path_length - other.path_length)
    }

    /// Component-wise mean. Infinite path lengths propagate.
    pub fn mean<'a>(items: impl IntoIterator<Item = &'a GraphMeasures>) -> Option<GraphMeasures> {
        let mut count = 0usize;
        let mut acc = GraphMeasures {
            clustering: 0.0,
            path_length: 0.0,
            connected_pair_fraction: 0.0,
        };
        for m in items {
            count += 1;
            acc.clustering += m.clustering;
            acc.path_length += m.path_length;
            acc.connected_pair_fraction += m.connected_pair_fraction;
        }
        (count > 0).then(|| {
            let k = count as f64;
            GraphMeasures {
                clustering: acc.clustering / k,
                path_length: acc.path_length / k,
                connected_pair_fraction: acc.connected_pair_fraction / k,
            }
        })
    }
}

/// Mean of the local clustering `C_i = 2·T_i / (k_i(k_i − 1))`, with
/// `C_i = 0` for nodes of degree below two.
pub fn clustering_coefficient(g: &BinaryGraph) -> f64 {
    let n = g.n();
    if n == 0 {
        return 0.0;
    }
    let local: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let k = g.degree(i);
            if k < 2 {
                return 0.0;
            }
            // each triangle through i is seen from both of its other corners
            let twice_triangles: usize = g.neighbors(i).map(|j| g.common_neighbors(i, j)).sum();
            twice_triangles as f64 / (k * (k - 1)) as f64
        })
        .collect();
    local.iter().sum::<f64>() / n as f64
}

/// Returns `(sum of distances, reachable nodes)` for a BFS rooted at `src`.
fn bfs_totals(g: &BinaryGraph, src: usize) -> (u64, u64) {
    let words = g.words_per_row();
    let mut visited = vec![0u64; words];
    visited[src / 64] |= 1 << (src % 64);
    let mut frontier = vec![src];
    let mut next = vec![0u64; words];
    let (mut total, mut reached, mut depth) = (0u64, 0u64, 0u64);
    while !frontier.is_empty() {
        depth += 1;
        next.iter_mut().for_each(|w| *w = 0);
        for &node in &frontier {
            for (dst, src_word) in next.iter_mut().zip(g.row(node)) {
                *dst |= src_word;
            }
        }
        frontier.clear();
        for (w, (word, seen)) in next.iter().zip(visited.iter_mut()).enumerate() {
            let mut fresh = word & !*seen;
            *seen |= fresh;
            while fresh != 0 {
                frontier.push(w * 64 + fresh.trailing_zeros() as usize);
                fresh &= fresh - 1;
            }
        }
        reached += frontier.len() as u64;
        total += depth * frontier.len() as u64;
    }
    (total, reached)
}

/// BFS from every node; averages over the ordered pairs that are connected.
pub fn average_path_length(g: &BinaryGraph) -> PathLength {
    let n = g.n();
    if n < 2 {
        return PathLength {
            mean: f64::INFINITY,
            connected_pair_fraction: 0.0,
        };
    }
    let (total, pairs) = (0..n)
        .into_par_iter()
        .map(|src| bfs_totals(g, src))
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let all_pairs = (n * (n - 1)) as f64;
    PathLength {
        mean: if pairs == 0 {
            f64::INFINITY
        } else {
            total as f64 / pairs as f64
        },
        connected_pair_fraction: pairs as f64 / all_pairs,
    }
}

/// Binarizes with the max rule at `tau` and computes both measures.
pub fn graph_measures(g: &DenseGraph, tau: Tau) -> Result<GraphMeasures, GraphError> {
    let t = tau.resolve(g.n());
    if !(t.is_finite() && t > 0.0) {
        return Err(GraphError::InvalidThreshold(t));
    }
    Ok(GraphMeasures::of_binary(&threshold_binarize(
        g,
        t,
        SymmetrizeRule::Max,
    )))
}

/// Block-diagonal stacking; off-diagonal blocks are zero.
pub fn diagonal_concat(graphs: &[DenseGraph]) -> Result<DenseGraph, GraphError> {
    let first = graphs.first().ok_or(GraphError::EmptyList)?;
    let total: usize = graphs.iter().map(DenseGraph::n).sum();
    let mut weights = Array2::zeros((total, total));
    let mut offset = 0;
    for g in graphs {
        let n = g.n();
        weights
            .slice_mut(s![offset..offset + n, offset..offset + n])
            .assign(&g.weights());
        offset += n;
    }
    let normalized = graphs.iter().all(DenseGraph::is_row_normalized);
    Ok(DenseGraph::from_parts(weights, first.kind(), normalized))
}
