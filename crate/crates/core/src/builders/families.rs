use ndarray::{s, Array2, ArrayView2};

use super::BuildError;
use crate::graph::{row_normalize_scaled, softmax_rows, DenseGraph, NodeKind};

fn shape_err(msg: String) -> BuildError {
    BuildError::ShapeMismatch(msg)
}

fn check_vit_shapes(
    pos_embed: ArrayView2<'_, f64>,
    wq: ArrayView2<'_, f64>,
    wk: ArrayView2<'_, f64>,
) -> Result<(), BuildError> {
    let d = pos_embed.ncols();
    if wq.dim() != (d, d) || wk.dim() != (d, d) {
        return Err(shape_err(format!(
            "pos_embed has {d} channels but Wq is {:?} and Wk is {:?}",
            wq.dim(),
            wk.dim()
        )));
    }
    Ok(())
}

/// Position-only self-attention graph `softmax(P·Wq·Wkᵀ·Pᵀ / √scale_dim)`.
///
/// `wq` and `wk` map row vectors (`q = x·Wq`). Row 0 of `pos_embed` is the
/// class token when the model has one.
pub fn vit_aggregation(
    pos_embed: ArrayView2<'_, f64>,
    wq: ArrayView2<'_, f64>,
    wk: ArrayView2<'_, f64>,
    scale_dim: usize,
) -> Result<DenseGraph, BuildError> {
    check_vit_shapes(pos_embed, wq, wk)?;
    let q = pos_embed.dot(&wq);
    let k = pos_embed.dot(&wk);
    let raw = q.dot(&k.t());
    Ok(row_normalize_scaled(raw.view(), scale_dim)?)
}

/// Multi-head variant: each head's logits use its own column slice of `Wq`
/// and `Wk` and its own `√head_dim`; the logits are averaged over heads
/// before a single softmax.
pub fn vit_aggregation_per_head(
    pos_embed: ArrayView2<'_, f64>,
    wq: ArrayView2<'_, f64>,
    wk: ArrayView2<'_, f64>,
    heads: usize,
) -> Result<DenseGraph, BuildError> {
    check_vit_shapes(pos_embed, wq, wk)?;
    let d = pos_embed.ncols();
    if heads == 0 || !d.is_multiple_of(heads) {
        return Err(shape_err(format!(
            "{heads} heads do not divide {d} channels"
        )));
    }
    let head_dim = d / heads;
    let q = pos_embed.dot(&wq);
    let k = pos_embed.dot(&wk);
    let n = pos_embed.nrows();
    let mut logits = Array2::<f64>::zeros((n, n));
    let scale = 1.0 / ((head_dim as f64).sqrt() * heads as f64);
    for h in 0..heads {
        let cols = s![.., h * head_dim..(h + 1) * head_dim];
        logits.scaled_add(scale, &q.slice(cols).dot(&k.slice(cols).t()));
    }
    Ok(DenseGraph::from_parts(
        softmax_rows(logits.view(), 1.0)?,
        NodeKind::Token,
        true,
    ))
}

/// Assignment of tokens to equally sized attention windows.
///
/// `windows[w][a]` is the token at window-local position `a` of window `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowLayout {
    n_tokens: usize,
    windows: Vec<Vec<usize>>,
}

impl WindowLayout {
    /// Checks that every token lands in exactly one window and all windows
    /// have the same size.
    pub fn new(n_tokens: usize, windows: Vec<Vec<usize>>) -> Result<Self, BuildError> {
        let size = windows.first().map_or(0, Vec::len);
        if size == 0 || windows.iter().any(|w| w.len() != size) {
            return Err(BuildError::BadWindowAssignment(
                "windows must be non-empty and equally sized".into(),
            ));
        }
        let mut seen = vec![false; n_tokens];
        for &t in windows.iter().flatten() {
            match seen.get_mut(t) {
                None => {
                    return Err(BuildError::BadWindowAssignment(format!(
                        "token {t} out of range for {n_tokens} tokens"
                    )))
                }
                Some(true) => {
                    return Err(BuildError::BadWindowAssignment(format!(
                        "token {t} assigned twice"
                    )))
                }
                Some(slot) => *slot = true,
            }
        }
        if let Some(t) = seen.iter().position(|s| !s) {
            return Err(BuildError::BadWindowAssignment(format!(
                "token {t} unassigned"
            )));
        }
        Ok(Self { n_tokens, windows })
    }

    /// Windows of a cyclically shifted `(h, w)` grid.
    ///
    /// The feature map is rolled by `-shift` along both axes and cut into
    /// `window × window` tiles, windows and positions in row-major order. This is
    /// the order attention masks are stored in.
    pub fn shifted_grid(
        grid: (usize, usize),
        window: usize,
        shift: usize,
    ) -> Result<Self, BuildError> {
        let (h, w) = grid;
        if window == 0 || h % window != 0 || w % window != 0 {
            return Err(BuildError::IndivisibleGrid {
                grid,
                factor: window,
            });
        }
        let mut windows = Vec::with_capacity((h / window) * (w / window));
        for wr in 0..h / window {
            for wc in 0..w / window {
                let mut tokens = Vec::with_capacity(window * window);
                for a in 0..window {
                    for b in 0..window {
                        let r = (wr * window + a + shift) % h;
                        let c = (wc * window + b + shift) % w;
                        tokens.push(r * w + c);
                    }
                }
                windows.push(tokens);
            }
        }
        Self::new(h * w, windows)
    }

    pub fn n_tokens(&self) -> usize {
        self.n_tokens
    }

    pub fn window_size(&self) -> usize {
        self.windows[0].len()
    }

    pub fn windows(&self) -> &[Vec<usize>] {
        &self.windows
    }
}

/// Expands a `[(2w−1)², heads]` relative-position table into one
/// `[w², w²]` bias matrix per head.
pub fn expand_relative_bias(
    table: ArrayView2<'_, f64>,
    window: usize,
) -> Result<Vec<Array2<f64>>, BuildError> {
    let span = 2 * window - 1;
    if table.nrows() != span * span {
        return Err(shape_err(format!(
            "relative bias table has {} rows, window {window} needs {}",
            table.nrows(),
            span * span
        )));
    }
    let nw = window * window;
    let heads = table.ncols();
    let mut out = vec![Array2::zeros((nw, nw)); heads];
    for i in 0..nw {
        let (ri, ci) = (i / window, i % window);
        for j in 0..nw {
            let (rj, cj) = (j / window, j % window);
            let idx = (ri + window - 1 - rj) * span + (ci + window - 1 - cj);
            for (h, m) in out.iter_mut().enumerate() {
                m[(i, j)] = table[(idx, h)];
            }
        }
    }
    Ok(out)
}

/// Window-attention graph: each window block is
/// `softmax(I/√scale_dim + bias + mask[w])`; tokens in different windows get
/// weight 0.
///
/// `masks` holds one matrix per window, or is empty for an unshifted layer.
pub fn swin_aggregation(
    bias: ArrayView2<'_, f64>,
    masks: &[Array2<f64>],
    layout: &WindowLayout,
    scale_dim: usize,
) -> Result<DenseGraph, BuildError> {
    let nw = layout.window_size();
    if bias.dim() != (nw, nw) {
        return Err(shape_err(format!(
            "bias is {:?}, windows hold {nw} tokens",
            bias.dim()
        )));
    }
    if !masks.is_empty() && masks.len() != layout.windows().len() {
        return Err(shape_err(format!(
            "{} masks for {} windows",
            masks.len(),
            layout.windows().len()
        )));
    }
    if let Some(m) = masks.iter().find(|m| m.dim() != (nw, nw)) {
        return Err(shape_err(format!(
            "mask is {:?}, expected ({nw}, {nw})",
            m.dim()
        )));
    }
    if scale_dim == 0 {
        return Err(crate::graph::GraphError::ZeroScale.into());
    }
    let diag = 1.0 / (scale_dim as f64).sqrt();
    let n = layout.n_tokens();
    let mut full = Array2::zeros((n, n));
    for (w, tokens) in layout.windows().iter().enumerate() {
        let mut logits = bias.to_owned();
        for a in 0..nw {
            logits[(a, a)] += diag;
        }
        if let Some(mask) = masks.get(w) {
            logits += mask;
        }
        let block = softmax_rows(logits.view(), 1.0)?;
        for (a, &ta) in tokens.iter().enumerate() {
            for (b, &tb) in tokens.iter().enumerate() {
                full[(ta, tb)] = block[(a, b)];
            }
        }
    }
    Ok(DenseGraph::from_parts(full, NodeKind::Token, true))
}

/// Token-mixing MLP graph `softmax(Wᵀ / √scale_dim)`.
///
/// The transpose makes row `i` the weights with which token `i` gathers from
/// the other tokens.
pub fn mixer_aggregation(
    token_weight: ArrayView2<'_, f64>,
    scale_dim: usize,
) -> Result<DenseGraph, BuildError> {
    let (r, c) = token_weight.dim();
    if r != c {
        return Err(shape_err(format!(
            "token weight must be square, got {r}x{c}"
        )));
    }
    Ok(row_normalize_scaled(token_weight.t(), scale_dim)?)
}

/// Average-pooling graph: `1/K²` towards every in-grid node of the `K×K`
/// window centred on each node; the padding outside the grid carries no
/// weight, so border rows sum to less than one.
pub fn metaformer_aggregation(
    grid: (usize, usize),
    kernel: usize,
) -> Result<DenseGraph, BuildError> {
    if kernel == 0 || kernel.is_multiple_of(2) {
        return Err(BuildError::BadKernel(kernel));
    }
    let (h, w) = grid;
    let half = kernel / 2;
    let weight = 1.0 / (kernel * kernel) as f64;
    let mut a = Array2::zeros((h * w, h * w));
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            for nr in r.saturating_sub(half)..(r + half + 1).min(h) {
                for nc in c.saturating_sub(half)..(c + half + 1).min(w) {
                    a[(i, nr * w + nc)] = weight;
                }
            }
        }
    }
    Ok(DenseGraph::from_parts(a, NodeKind::Token, false))
}

/// Channel graph `softmax(W1·W2 / √scale_dim)` of a two-layer channel MLP.
pub fn affine_graph(
    fc1: ArrayView2<'_, f64>,
    fc2: ArrayView2<'_, f64>,
    scale_dim: usize,
) -> Result<DenseGraph, BuildError> {
    let (d, h) = fc1.dim();
    if fc2.dim() != (h, d) {
        return Err(shape_err(format!(
            "fc1 is {d}x{h}, so fc2 must be {h}x{d}, got {:?}",
            fc2.dim()
        )));
    }
    Ok(row_normalize_scaled(fc1.dot(&fc2).view(), scale_dim)?.with_kind(NodeKind::Channel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    const HI: f64 = 0.7310585786300049; // e / (e + 1)
    const LO: f64 = 0.2689414213699951; // 1 / (e + 1)

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn vit_zero_positions_are_uniform() {
        let p = Array2::zeros((5, 3));
        let w = Array2::from_shape_fn((3, 3), |(i, j)| (i * 3 + j) as f64);
        let g = vit_aggregation(p.view(), w.view(), w.view(), 3).unwrap();
        assert!(g.weights().iter().all(|&v| close(v, 0.2)));
    }

    #[test]
    fn vit_two_tokens() {
        let p = array![[1.0], [0.0]];
        let one = array![[1.0]];
        let g = vit_aggregation(p.view(), one.view(), one.view(), 1).unwrap();
        assert!(close(g.get(0, 0), HI) && close(g.get(0, 1), LO));
        assert!(close(g.get(1, 0), 0.5) && close(g.get(1, 1), 0.5));
    }

    #[test]
    fn per_head_with_one_head_matches_whole_matrix() {
        let p = Array2::from_shape_fn((6, 4), |(i, j)| ((i * 7 + j * 3) % 5) as f64 * 0.3 - 0.5);
        let wq = Array2::from_shape_fn((4, 4), |(i, j)| ((i + 2 * j) % 3) as f64 * 0.2);
        let wk = Array2::from_shape_fn((4, 4), |(i, j)| ((3 * i + j) % 4) as f64 * 0.1);
        let whole = vit_aggregation(p.view(), wq.view(), wk.view(), 4).unwrap();
        let heads = vit_aggregation_per_head(p.view(), wq.view(), wk.view(), 1).unwrap();
        for (a, b) in whole.weights().iter().zip(heads.weights()) {
            assert!(close(*a, *b));
        }
        assert!(vit_aggregation_per_head(p.view(), wq.view(), wk.view(), 3).is_err());
    }

    #[test]
    fn swin_identity_logits() {
        let layout = WindowLayout::shifted_grid((4, 4), 2, 0).unwrap();
        let g = swin_aggregation(Array2::zeros((4, 4)).view(), &[], &layout, 1).unwrap();
        let e = std::f64::consts::E;
        for w in layout.windows() {
            for &a in w {
                for &b in w {
                    let want = if a == b {
                        e / (e + 3.0)
                    } else {
                        1.0 / (e + 3.0)
                    };
                    assert!(close(g.get(a, b), want));
                }
            }
        }
        assert!((g.get(0, 0) - 0.47536).abs() < 1e-5);
        assert!((g.get(0, 1) - 0.17488).abs() < 1e-5);
        // token 0 and token 2 sit in different windows
        assert_eq!(g.get(0, 2), 0.0);
    }

    #[test]
    fn swin_mask_suppresses_pairs() {
        let layout = WindowLayout::shifted_grid((2, 2), 2, 1).unwrap();
        let mut mask = Array2::zeros((4, 4));
        mask[(0, 3)] = -1e9;
        mask[(3, 0)] = -1e9;
        let g = swin_aggregation(Array2::zeros((4, 4)).view(), &[mask], &layout, 4).unwrap();
        let (t0, t3) = (layout.windows()[0][0], layout.windows()[0][3]);
        assert!(g.get(t0, t3) < 1e-12);
        assert!(g.row_sums().iter().all(|s| (s - 1.0).abs() < 1e-12));
    }

    #[test]
    fn shifted_layout_rolls_tokens() {
        let layout = WindowLayout::shifted_grid((4, 4), 2, 1).unwrap();
        // first window starts at original (1, 1)
        assert_eq!(layout.windows()[0], vec![5, 6, 9, 10]);
        // last window wraps around to the first row and column
        assert_eq!(layout.windows()[3], vec![15, 12, 3, 0]);
    }

    #[test]
    fn bad_window_assignments() {
        assert!(matches!(
            WindowLayout::new(4, vec![vec![0, 1], vec![1, 2]]),
            Err(BuildError::BadWindowAssignment(_))
        ));
        assert!(matches!(
            WindowLayout::new(4, vec![vec![0, 1], vec![2, 2]]),
            Err(BuildError::BadWindowAssignment(_))
        ));
        assert!(matches!(
            WindowLayout::new(5, vec![vec![0, 1], vec![2, 3]]),
            Err(BuildError::BadWindowAssignment(_))
        ));
    }

    #[test]
    fn relative_bias_indexing() {
        // table value encodes (dr, dc) offsets
        let window = 2;
        let table = Array2::from_shape_fn((9, 1), |(i, _)| i as f64);
        let b = &expand_relative_bias(table.view(), window).unwrap()[0];
        // zero offset sits at the centre of the 3x3 table
        assert!((0..4).all(|i| b[(i, i)] == 4.0));
        // token 0 at (0,0) to token 3 at (1,1): offset (-1,-1) -> index 0
        assert_eq!(b[(0, 3)], 0.0);
        assert_eq!(b[(3, 0)], 8.0);
        assert_eq!(b[(0, 1)], 3.0);
    }

    #[test]
    fn mixer_uses_transpose() {
        let w = array![[0.0, 1.0], [0.0, 0.0]];
        let g = mixer_aggregation(w.view(), 1).unwrap();
        assert!(close(g.get(0, 0), 0.5) && close(g.get(0, 1), 0.5));
        assert!(close(g.get(1, 0), HI) && close(g.get(1, 1), LO));
        let id = Array2::<f64>::eye(4) * 1e4;
        let g = mixer_aggregation(id.view(), 1).unwrap();
        assert!((0..4).all(|i| g.get(i, i) > 1.0 - 1e-12));
    }

    #[test]
    fn pooling_graph() {
        assert_eq!(
            metaformer_aggregation((3, 3), 1).unwrap().into_weights(),
            Array2::<f64>::eye(9)
        );
        let g = metaformer_aggregation((14, 14), 3).unwrap();
        let interior = 5 * 14 + 5;
        assert_eq!(
            g.weights()
                .row(interior)
                .iter()
                .filter(|&&v| v == 1.0 / 9.0)
                .count(),
            9
        );
        assert!(close(g.row_sums()[interior], 1.0));
        assert_eq!(g.weights().row(0).iter().filter(|&&v| v > 0.0).count(), 4);
        assert!(close(g.row_sums()[0], 4.0 / 9.0));
        assert_eq!(
            metaformer_aggregation((4, 4), 2),
            Err(BuildError::BadKernel(2))
        );
        assert_eq!(
            metaformer_aggregation((4, 4), 0),
            Err(BuildError::BadKernel(0))
        );
    }

    #[test]
    fn affine() {
        let fc1 = array![[1.0], [0.0]];
        let fc2 = array![[1.0, 0.0]];
        let g = affine_graph(fc1.view(), fc2.view(), 1).unwrap();
        assert_eq!(g.kind(), NodeKind::Channel);
        assert!(close(g.get(0, 0), HI) && close(g.get(1, 1), 0.5));
        let g = affine_graph(
            Array2::zeros((3, 5)).view(),
            Array2::zeros((5, 3)).view(),
            3,
        )
        .unwrap();
        assert!(g.weights().iter().all(|&v| close(v, 1.0 / 3.0)));
        assert!(affine_graph(fc1.view(), fc1.view(), 1).is_err());
    }
}
