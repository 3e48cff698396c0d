use serde::Serialize;

use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    /// Sample Pearson coefficient.
    pub r: f64,
    /// `r·√((n−2)/(1−r²))`; infinite for a perfect fit.
    pub t_statistic: f64,
    pub n: usize,
}

pub fn linear_correlation(points: &[(f64, f64)]) -> Result<Correlation, AnalysisError> {
    if points.len() < 3 {
        return Err(AnalysisError::InsufficientPoints {
            needed: 3,
            got: points.len(),
        });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalysisError::ConstantSeries);
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let rest = 1.0 - r * r;
    let t_statistic = if rest == 0.0 {
        f64::INFINITY.copysign(r)
    } else {
        r * ((n - 2.0) / rest).sqrt()
    };
    Ok(Correlation {
        r,
        t_statistic,
        n: points.len(),
    })
}
