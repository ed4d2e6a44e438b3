//! Transforms of the power-law memory kernel `K(t) = 2h(2h-1)|t|^(2h-2)`.
//!
//! The Fourier convention is `f~(w) = ∫ e^{itw} f(t) dt`.

use std::f64::consts::PI;

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use crate::error::{domain, Error, Result};
use crate::params::Hurst;

fn nonzero(w: f64) -> Result<f64> {
    if w == 0.0 {
        Err(Error::Singular(
            "kernel transform diverges at zero frequency".into(),
        ))
    } else if !w.is_finite() {
        Err(domain(format!("frequency must be finite, got {w}")))
    } else {
        Ok(w)
    }
}

/// `K~(w) = 2 Gamma(2h+1) sin(h pi) |w|^(1-2h)`.
pub fn kernel_fourier_full(h: Hurst, w: f64) -> Result<f64> {
    let h = h.require_subdiffusive()?.value();
    let w = nonzero(w)?;
    Ok(2.0 * gamma(2.0 * h + 1.0) * (h * PI).sin() * w.abs().powf(1.0 - 2.0 * h))
}

/// One-sided transform `∫_0^∞ e^{itw} K(t) dt`,
/// `Gamma(2h+1) |w|^(1-2h) [sin(h pi) - i cos(h pi) sign(w)]`.
pub fn kernel_fourier_half(h: Hurst, w: f64) -> Result<Complex64> {
    let h = h.require_subdiffusive()?.value();
    let w = nonzero(w)?;
    let amp = gamma(2.0 * h + 1.0) * w.abs().powf(1.0 - 2.0 * h);
    let (s, c) = (h * PI).sin_cos();
    Ok(Complex64::new(amp * s, -amp * c * w.signum()))
}

/// `∫_0^∞ e^{-st} K(t) dt = Gamma(2h+1) s^(1-2h)`.
pub fn kernel_laplace(h: Hurst, s: f64) -> Result<f64> {
    let h = h.require_subdiffusive()?.value();
    if !(s > 0.0 && s.is_finite()) {
        return Err(domain(format!(
            "Laplace variable must be positive, got {s}"
        )));
    }
    Ok(gamma(2.0 * h + 1.0) * s.powf(1.0 - 2.0 * h))
}
