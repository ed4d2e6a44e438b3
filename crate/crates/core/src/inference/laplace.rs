//! Numerical Laplace transforms of tabulated covariances and the exact
//! relation between the displacement and kernel transforms of the
//! overdamped model:
//!
//! `K(s) = (m psi / zeta) m psi c(s) / (k_B T - m psi s c(s))`,
//! `c(s) = (k_B T zeta / m psi) K(s) / (m psi + zeta s K(s))`.

use crate::error::{domain, input, Error, Result};
use crate::params::PhysicalParams;
use crate::specfun::quadrature::{integrate, Tolerance};
use crate::trace::{log_grid, CovarianceCurve, LaplaceCurve};

use super::fit_power_law;

/// Resolvable band `[10 / T, 1 / (10 dt)]` of a tabulated curve, with `T`
/// its last lag and `dt` its smallest spacing.
pub fn resolvable_band(curve: &CovarianceCurve) -> Result<(f64, f64)> {
    if curve.len() < 2 {
        return Err(input("a Laplace transform needs at least two lags"));
    }
    let total = curve.lags[curve.len() - 1];
    let dt = curve
        .lags
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    Ok((10.0 / total, 1.0 / (10.0 * dt)))
}

/// `points_per_decade` log-spaced values filling the resolvable band.
pub fn default_s_grid(curve: &CovarianceCurve, points_per_decade: usize) -> Result<Vec<f64>> {
    let (lo, hi) = resolvable_band(curve)?;
    if !(hi > lo) {
        return Err(input(
            "the curve is too short for any resolvable Laplace variable",
        ));
    }
    let n = ((hi / lo).log10() * points_per_decade as f64).floor() as usize + 1;
    Ok(log_grid(lo, hi, n.max(2)))
}

/// `∫_0^h e^{-s u} (c0 + (c1 - c0) u / h) du`, exact.
fn linear_segment(s: f64, h: f64, c0: f64, c1: f64) -> f64 {
    let x = s * h;
    if x < 1e-4 {
        // Series in x avoids cancellation.
        let i0 = h * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0);
        let i1 = h * h * (0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0);
        return c0 * i0 + (c1 - c0) / h * i1;
    }
    let e = (-x).exp();
    let i0 = -(-x).exp_m1() / s;
    let i1 = (-(-x).exp_m1() - x * e) / (s * s);
    c0 * i0 + (c1 - c0) / h * i1
}

/// Power-law tail `A t^slope` fitted to the last decade of the curve, when
/// the values there are positive and decaying.
fn tail_model(curve: &CovarianceCurve) -> Option<(f64, f64)> {
    let total = curve.lags[curve.len() - 1];
    let (t, y): (Vec<f64>, Vec<f64>) = curve
        .lags
        .iter()
        .zip(&curve.values)
        .filter(|(t, _)| **t >= 0.1 * total && **t > 0.0)
        .map(|(t, y)| (*t, *y))
        .unzip();
    if t.len() < 3 || y.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    let fit = fit_power_law(&t, &y).ok()?;
    (fit.slope < 0.0).then_some((fit.intercept.exp(), fit.slope))
}

/// `∫_0^∞ e^{-st} C(t) dt` at each `s`: exact integration of the
/// piecewise-linear interpolant up to the last lag plus a fitted power-law
/// tail beyond it.
pub fn laplace_transform_curve(curve: &CovarianceCurve, s_grid: &[f64]) -> Result<LaplaceCurve> {
    let (lo, hi) = resolvable_band(curve)?;
    for &s in s_grid {
        if !(s >= lo * (1.0 - 1e-12) && s <= hi * (1.0 + 1e-12)) {
            return Err(Error::Band { s, lo, hi });
        }
    }
    let tail = tail_model(curve);
    let total = curve.lags[curve.len() - 1];
    let mut values = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let mut acc = 0.0;
        // Direct sum; terms are O(1) and decay, so no compensation is needed.
        for k in 0..curve.len() - 1 {
            let (t0, t1) = (curve.lags[k], curve.lags[k + 1]);
            acc +=
                (-s * t0).exp() * linear_segment(s, t1 - t0, curve.values[k], curve.values[k + 1]);
        }
        if let Some((a, p)) = tail {
            let f = |t: f64| (-s * (t - total)).exp() * a * t.powf(p);
            let end = total + 60.0 / s;
            let part = integrate(f, total, end, Tolerance::new(0.0, 1e-10))?;
            acc += (-s * total).exp() * part.value;
        }
        values.push(acc);
    }
    LaplaceCurve::new(s_grid.to_vec(), values)
}

fn harmonic_constants(p: &PhysicalParams) -> Result<(f64, f64, f64)> {
    let psi = p.require_psi()?;
    Ok((p.m * psi, p.zeta, p.kbt))
}

/// Relative size below which the recovery denominator counts as zero.
pub const SINGULAR_TOLERANCE: f64 = 1e-10;

/// Kernel transform from the displacement-covariance transform.
pub fn recover_kernel(cov: &LaplaceCurve, p: &PhysicalParams) -> Result<LaplaceCurve> {
    let (mpsi, zeta, kbt) = harmonic_constants(p)?;
    let values = cov
        .s()
        .iter()
        .zip(cov.values())
        .map(|(&s, &c)| {
            let den = kbt - mpsi * s * c;
            if den.abs() <= SINGULAR_TOLERANCE * kbt {
                return Err(Error::SingularRecovery {
                    s,
                    denominator: den,
                });
            }
            Ok(mpsi / zeta * mpsi * c / den)
        })
        .collect::<Result<Vec<f64>>>()?;
    LaplaceCurve::new(cov.s().to_vec(), values)
}

/// Displacement-covariance transform from a kernel transform.
pub fn covariance_from_kernel(kernel: &LaplaceCurve, p: &PhysicalParams) -> Result<LaplaceCurve> {
    let (mpsi, zeta, kbt) = harmonic_constants(p)?;
    let values = kernel
        .s()
        .iter()
        .zip(kernel.values())
        .map(|(&s, &k)| {
            let den = mpsi + zeta * s * k;
            if den == 0.0 {
                return Err(domain(format!(
                    "kernel value makes the forward map singular at s = {s}"
                )));
            }
            Ok(kbt * zeta / mpsi * k / den)
        })
        .collect::<Result<Vec<f64>>>()?;
    LaplaceCurve::new(kernel.s().to_vec(), values)
}
