use super::DenseGraph;

/// How the two directed weights of a node pair are folded into one before
/// thresholding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SymmetrizeRule {
    /// `max(g[i][j], g[j][i])`; keeps any strong one-way link.
    #[default]
    Max,
    /// `(g[i][j] + g[j][i]) / 2`.
    Mean,
}

/// Undirected, unweighted graph without self-loops.
///
/// Rows are stored as bitsets so neighbourhood intersections and BFS
/// frontiers reduce to word-wise operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryGraph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BinaryGraph {
    /// Graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    /// Builds a graph from an undirected edge list. Self-loops are ignored.
    ///
    /// # Panics
    /// If an endpoint is out of range.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::empty(n);
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// Adds `{a, b}`. Returns false for self-loops, which are never stored.
    pub fn add_edge(&mut self, a: usize, b: usize) -> bool {
        assert!(
            a < self.n && b < self.n,
            "edge ({a}, {b}) out of range for n={}",
            self.n
        );
        if a == b {
            return false;
        }
        self.set(a, b);
        self.set(b, a);
        true
    }

    fn set(&mut self, row: usize, col: usize) {
        self.bits[row * self.words + col / 64] |= 1 << (col % 64);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.row(a)[b / 64] >> (b % 64) & 1 == 1
    }

    pub fn degree(&self, node: usize) -> usize {
        self.row(node).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(node).iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + bit)
            })
        })
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| {
            self.neighbors(a)
                .filter(move |&b| b > a)
                .map(move |b| (a, b))
        })
    }

    pub(crate) fn row(&self, node: usize) -> &[u64] {
        &self.bits[node * self.words..(node + 1) * self.words]
    }

    pub(crate) fn words_per_row(&self) -> usize {
        self.words
    }

    /// `|N(a) ∩ N(b)|`.
    pub(crate) fn common_neighbors(&self, a: usize, b: usize) -> usize {
        self.row(a)
            .iter()
            .zip(self.row(b))
            .map(|(x, y)| (x & y).count_ones() as usize)
            .sum()
    }
}

/// Keeps pair `{i, j}` (i ≠ j) when its symmetrized weight is strictly above `tau`.
///
/// Raising `tau` can only remove edges.
pub fn threshold_binarize(g: &DenseGraph, tau: f64, rule: SymmetrizeRule) -> BinaryGraph {
    let n = g.n();
    let w = g.weights();
    let mut out = BinaryGraph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let folded = match rule {
                SymmetrizeRule::Max => w[(i, j)].max(w[(j, i)]),
                SymmetrizeRule::Mean => 0.5 * (w[(i, j)] + w[(j, i)]),
            };
            if folded > tau {
                out.add_edge(i, j);
            }
        }
    }
    out
}
