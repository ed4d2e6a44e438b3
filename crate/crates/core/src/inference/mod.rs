//! Estimators and inverse procedures applied to sampled traces.

pub mod autocorr;
pub mod fit;
pub mod hurst;
pub mod laplace;
pub mod potential;

pub use autocorr::{empirical_autocorrelation, ensemble_autocovariance};
pub use fit::{amplitude_from_moments, fit_overdamped_model, FitOptions, FitResult};
pub use hurst::{estimate_hurst_msd, HurstEstimate};
pub use laplace::{
    covariance_from_kernel, laplace_transform_curve, recover_kernel, resolvable_band,
};
pub use potential::{reconstruct_potential, PotentialCurve};

use crate::error::{input, Result};

/// Ordinary least-squares line `y = intercept + slope x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return Err(input("line fit needs at least two paired points"));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if !(sxx > 0.0) {
        return Err(input("line fit needs at least two distinct abscissae"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (slope_stderr, intercept_stderr) = if n > 2 {
        let rss: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| (b - intercept - slope * a).powi(2))
            .sum();
        let s2 = rss / (nf - 2.0);
        ((s2 / sxx).sqrt(), (s2 * (1.0 / nf + mx * mx / sxx)).sqrt())
    } else {
        (0.0, 0.0)
    };
    Ok(LineFit {
        slope,
        intercept,
        slope_stderr,
        intercept_stderr,
    })
}

/// Least-squares fit of `log y = log A + b log t` over positive pairs.
pub fn fit_power_law(t: &[f64], y: &[f64]) -> Result<LineFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .unzip();
    if lx.len() != t.len() {
        return Err(input(
            "power-law fit needs strictly positive abscissae and values",
        ));
    }
    fit_line(&lx, &ly)
}
