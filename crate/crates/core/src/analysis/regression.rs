use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Which graph measure a fit or interval refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureName {
    Clustering,
    PathLength,
}

impl std::fmt::Display for MeasureName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MeasureName::Clustering => "clustering",
            MeasureName::PathLength => "path_length",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Curvature {
    Min,
    Max,
    Degenerate,
}

/// `y = a·x² + b·x + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `−b / 2a`; `None` when the fit is degenerate.
    pub extremum_x: Option<f64>,
    pub r_squared: f64,
    pub curvature: Curvature,
}

impl QuadraticFit {
    /// A fit with the given coefficients and a perfect `r²`.
    pub fn from_coefficients(a: f64, b: f64, c: f64) -> Self {
        let curvature = if a > 0.0 {
            Curvature::Min
        } else if a < 0.0 {
            Curvature::Max
        } else {
            Curvature::Degenerate
        };
        Self {
            a,
            b,
            c,
            extremum_x: (curvature != Curvature::Degenerate).then(|| -b / (2.0 * a)),
            r_squared: 1.0,
            curvature,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }
}

/// Ordinary least-squares parabola.
///
/// `x` is centred and scaled to unit variance before the normal equations are
/// solved, then the coefficients are mapped back. The fit is flagged
/// degenerate when the quadratic term moves `y` by less than `1e-12` of its
/// magnitude across the sampled `x` range.
///
/// ```
/// use relgraph::analysis::{fit_quadratic, Curvature};
///
/// let pts: Vec<_> = (0..5).map(|i| (i as f64, (i as f64 - 2.0).powi(2) + 1.0)).collect();
/// let fit = fit_quadratic(&pts).unwrap();
/// assert_eq!(fit.curvature, Curvature::Min);
/// assert!((fit.extremum_x.unwrap() - 2.0).abs() < 1e-12);
/// ```
pub fn fit_quadratic(points: &[(f64, f64)]) -> Result<QuadraticFit, AnalysisError> {
    if points.len() < 3 {
        return Err(AnalysisError::InsufficientPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(AnalysisError::RankDeficient);
    }

    let n = points.len() as f64;
    let mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let std = (points.iter().map(|p| (p.0 - mean).powi(2)).sum::<f64>() / n).sqrt();

    let mut gram = Matrix3::<f64>::zeros();
    let mut rhs = Vector3::<f64>::zeros();
    for &(x, y) in points {
        let u = (x - mean) / std;
        let row = Vector3::new(1.0, u, u * u);
        gram += row * row.transpose();
        rhs += row * y;
    }
    let beta = gram.lu().solve(&rhs).ok_or(AnalysisError::RankDeficient)?;
    let (c0, c1, c2) = (beta[0], beta[1], beta[2]);

    // y = c2·((x−m)/s)² + c1·(x−m)/s + c0
    let a = c2 / (std * std);
    let b = c1 / std - 2.0 * c2 * mean / (std * std);
    let c = c0 - c1 * mean / std + c2 * mean * mean / (std * std);

    let spread = xs[xs.len() - 1] - xs[0];
    let y_scale = points
        .iter()
        .map(|p| p.1.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut fit = QuadraticFit::from_coefficients(a, b, c);
    if (a * spread * spread).abs() < 1e-12 * y_scale {
        fit.curvature = Curvature::Degenerate;
        fit.extremum_x = None;
    }

    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - y_mean).powi(2)).sum();
    let ss_res: f64 = points.iter().map(|&(x, y)| (y - fit.eval(x)).powi(2)).sum();
    fit.r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(fit)
}

/// Interval spanned by the per-dataset extrema of one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweetSpot {
    pub measure: MeasureName,
    pub low: f64,
    pub high: f64,
    pub datasets: Vec<String>,
}

impl SweetSpot {
    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }
}

/// `[min, max]` of the extrema of fits from two or more datasets.
pub fn sweet_spot(
    measure: MeasureName,
    fits: &[(String, QuadraticFit)],
) -> Result<SweetSpot, AnalysisError> {
    if fits.len() < 2 {
        return Err(AnalysisError::TooFewDatasets(fits.len()));
    }
    let mut low = f64::INFINITY;
    let mut high = f64::NEG_INFINITY;
    for (name, fit) in fits {
        let x = fit
            .extremum_x
            .filter(|_| fit.curvature != Curvature::Degenerate)
            .ok_or_else(|| AnalysisError::DegenerateFit(name.clone()))?;
        low = low.min(x);
        high = high.max(x);
    }
    Ok(SweetSpot {
        measure,
        low,
        high,
        datasets: fits.iter().map(|(n, _)| n.clone()).collect(),
    })
}
