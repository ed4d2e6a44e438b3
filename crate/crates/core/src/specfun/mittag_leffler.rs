//! The one-parameter Mittag-Leffler function on the negative real axis.
//!
//! `E_a(-x)` for `0 < a <= 1`, `x >= 0` is completely monotone. Three
//! evaluation regimes are used:
//!
//! * the Taylor series `sum (-x)^k / Gamma(a k + 1)` for `x <= 1`,
//! * the asymptotic expansion `sum_{k>=1} (-1)^{k+1} x^-k / Gamma(1 - a k)`
//!   when it converges to full precision before its terms start to grow,
//! * otherwise the real integral representation
//!   `E_a(-x) = sin(a pi)/(2 pi) ∫ exp(-s e^u) / (cosh(a u) + cos(a pi)) du`
//!   with `s = x^(1/a)`, which is positive and free of cancellation.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use super::quadrature::{integrate_points, Tolerance};
use crate::error::{domain, Result};

/// Radius below which the Taylor series is used.
pub const SERIES_RADIUS: f64 = 1.0;

fn check(alpha: f64, x: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!(
            "Mittag-Leffler index must lie in (0, 1], got {alpha}"
        )));
    }
    if !(x >= 0.0) {
        return Err(domain(format!(
            "Mittag-Leffler argument must be real and non-positive, got {}",
            -x
        )));
    }
    Ok(())
}

/// `E_alpha(z)` for `0 < alpha <= 1` and `z <= 0`.
pub fn mittag_leffler(alpha: f64, z: f64) -> Result<f64> {
    let x = -z;
    check(alpha, x)?;
    Ok(ml_neg(alpha, x))
}

/// `E_alpha(-x)`, arguments assumed valid.
pub(crate) fn ml_neg(alpha: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if alpha == 1.0 {
        return (-x).exp();
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x <= SERIES_RADIUS {
        return series(alpha, x);
    }
    if let Some(v) = asymptotic(alpha, x) {
        return v;
    }
    integral(alpha, x)
}

/// Taylor series of `E_alpha(-x)`.
pub fn series(alpha: f64, x: f64) -> f64 {
    let mut sum = 1.0;
    let lx = x.ln();
    for k in 1..10_000 {
        let kf = k as f64;
        let mag = (kf * lx - ln_gamma(alpha * kf + 1.0)).exp();
        let term = if k % 2 == 1 { -mag } else { mag };
        sum += term;
        if mag < 1e-17 * sum.abs() && kf * alpha > 2.0 {
            break;
        }
    }
    sum
}

/// Asymptotic expansion of `E_alpha(-x)` for `alpha < 1`, or `None` if it
/// does not reach a relative accuracy of 1e-14.
///
/// Uses `1/Gamma(1 - a k) = sin(pi a k) Gamma(a k) / pi`, which vanishes
/// exactly when `a k` is an integer.
pub fn asymptotic(alpha: f64, x: f64) -> Option<f64> {
    if alpha >= 1.0 {
        return None;
    }
    let lx = x.ln();
    let mut sum = 0.0;
    let mut prev_mag = f64::INFINITY;
    for k in 1..500 {
        let kf = k as f64;
        let ak = alpha * kf;
        let mag = (ln_gamma(ak) - kf * lx).exp() / PI;
        if mag > prev_mag && k > 2 {
            return None;
        }
        prev_mag = mag;
        let s = if ak.fract() == 0.0 {
            0.0
        } else {
            (PI * ak).sin()
        };
        let term = if k % 2 == 1 { mag * s } else { -mag * s };
        sum += term;
        if mag < 1e-16 * sum.abs() {
            return (sum > 0.0).then_some(sum);
        }
    }
    None
}

/// Integral representation of `E_alpha(-x)` for `0 < alpha < 1`, `x > 0`.
pub fn integral(alpha: f64, x: f64) -> f64 {
    let s = x.powf(1.0 / alpha);
    let (sn, cs) = (alpha * PI).sin_cos();
    let pref = sn / (2.0 * PI);
    let f = |u: f64| {
        let e = (-s * u.exp()).exp();
        if e == 0.0 {
            return 0.0;
        }
        pref * e / ((alpha * u).cosh() + cs)
    };
    // Below `lower` the exponential factor is 1 to double precision and the
    // remaining rational integral has a closed form.
    let lower = (1e-17 / s).ln().min(-1.0);
    let upper = (50.0 / s).ln().max(1.0);
    let r = (alpha * lower).exp();
    let below = (r * sn / (1.0 + cs * r)).atan() / (alpha * PI);

    let mut pts = vec![lower, upper, 0.0, -s.ln()];
    pts.retain(|p| *p >= lower && *p <= upper);
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    let width = (1.0 + cs).max(1e-300).sqrt() / alpha;
    if width < 0.5 {
        // Sharp peak at u = 0 as alpha -> 1.
        for m in [-4.0, -1.0, 1.0, 4.0] {
            let p = m * width;
            if p > lower && p < upper {
                pts.push(p);
            }
        }
        pts.sort_by(|a, b| a.total_cmp(b));
    }
    let body = integrate_points(f, &pts, Tolerance::new(1e-300, 1e-13))
        .or_else(|_| integrate_points(f, &pts, Tolerance::new(1e-300, 1e-11)))
        .map(|e| e.value)
        .unwrap_or(f64::NAN);
    below + body
}
