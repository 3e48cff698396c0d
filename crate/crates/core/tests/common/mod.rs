//! Brute-force reimplementations used as oracles. Nothing here calls into
//! the library's graph code.
#![allow(dead_code, clippy::needless_range_loop)]

pub mod models;

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Symmetric adjacency without self-loops, each pair present with probability `p`.
pub fn random_adjacency(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }
    adj
}

/// The 200 seeded graphs of the oracle suite: n in 1..=12, densities 0.2, 0.5, 0.8.
pub fn oracle_graphs() -> Vec<Vec<Vec<bool>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..200)
        .map(|k| {
            let n = rng.random_range(1..=12);
            random_adjacency(&mut rng, n, [0.2, 0.5, 0.8][k % 3])
        })
        .collect()
}

pub fn edges_of(adj: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let n = adj.len();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| adj[i][j])
        .collect()
}

/// Mean local clustering by enumerating every neighbour pair.
pub fn clustering_oracle(adj: &[Vec<bool>]) -> f64 {
    let n = adj.len();
    if n == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&j| adj[i][j]).collect();
        let k = nb.len();
        if k < 2 {
            continue;
        }
        let mut links = 0usize;
        for a in 0..k {
            for b in a + 1..k {
                if adj[nb[a]][nb[b]] {
                    links += 1;
                }
            }
        }
        total += 2.0 * links as f64 / (k * (k - 1)) as f64;
    }
    total / n as f64
}

/// `(mean over connected ordered pairs, connected fraction)` via Floyd–Warshall.
pub fn path_length_oracle(adj: &[Vec<bool>]) -> (f64, f64) {
    let n = adj.len();
    let inf = f64::INFINITY;
    let mut d = vec![vec![inf; n]; n];
    for i in 0..n {
        d[i][i] = 0.0;
        for j in 0..n {
            if adj[i][j] {
                d[i][j] = 1.0;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let (mut sum, mut pairs) = (0.0, 0usize);
    for i in 0..n {
        for j in 0..n {
            if i != j && d[i][j].is_finite() {
                sum += d[i][j];
                pairs += 1;
            }
        }
    }
    let all = n * n.saturating_sub(1);
    let frac = if all == 0 {
        0.0
    } else {
        pairs as f64 / all as f64
    };
    if pairs == 0 {
        (inf, frac)
    } else {
        (sum / pairs as f64, frac)
    }
}

pub type Mat = Vec<Vec<f64>>;

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, m, p) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; p]; n];
    for i in 0..n {
        for k in 0..m {
            for j in 0..p {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn softmax_rows(a: &Mat, divisor: f64) -> Mat {
    a.iter()
        .map(|row| {
            let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let e: Vec<f64> = row.iter().map(|v| ((v - m) / divisor).exp()).collect();
            let s: f64 = e.iter().sum();
            e.into_iter().map(|v| v / s).collect()
        })
        .collect()
}

/// `a[i][j] > tau` or `a[j][i] > tau`, diagonal ignored.
pub fn binarize(a: &Mat, tau: f64) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && (a[i][j] > tau || a[j][i] > tau))
                .collect()
        })
        .collect()
}

/// Average pooling of a `K×K` window on an `h×w` grid, zero outside the grid.
pub fn pooling_matrix(h: usize, w: usize, k: usize) -> Mat {
    let half = (k / 2) as i64;
    let n = h * w;
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        let (ri, ci) = ((i / w) as i64, (i % w) as i64);
        for j in 0..n {
            let (rj, cj) = ((j / w) as i64, (j % w) as i64);
            if (ri - rj).abs() <= half && (ci - cj).abs() <= half {
                a[i][j] = 1.0 / (k * k) as f64;
            }
        }
    }
    a
}

/// `(C, L)` of `depth` stacked pooling layers composed and softmaxed, at `1/n`.
pub fn metaformer_oracle(grid: usize, k: usize, depth: usize) -> (f64, f64) {
    let layer = pooling_matrix(grid, grid, k);
    let mut acc = layer.clone();
    for _ in 1..depth {
        acc = matmul(&layer, &acc);
    }
    let composed = softmax_rows(&acc, 1.0);
    let adj = binarize(&composed, 1.0 / (grid * grid) as f64);
    (clustering_oracle(&adj), path_length_oracle(&adj).0)
}
