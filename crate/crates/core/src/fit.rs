//! Least-squares fits used by the estimate checks.

use crate::error::{Error, Result};

/// Minimum number of usable samples for a slope fit.
pub const MIN_FIT_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub samples: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept` over finite pairs.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(x, y)| (*x, *y))
        .collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::DegenerateFit {
            usable: pts.len(),
            needed: MIN_FIT_SAMPLES,
        });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit {
            usable: 1,
            needed: MIN_FIT_SAMPLES,
        });
    }
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
        samples: pts.len(),
    })
}

/// Fit `y ≈ C x^slope` on strictly positive samples.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .unzip();
    linear_fit(&lx, &ly)
}
