//! Stationary covariances, spectral densities and mean squared displacement.
//!
//! Spectral densities use the full Fourier convention
//! `S(w) = ∫ e^{itw} C(t) dt`, so `C(t) = (1/pi) ∫_0^∞ S(w) cos(tw) dw`.

use std::f64::consts::PI;

use rayon::prelude::*;
use statrs::function::gamma::gamma;

use crate::error::{domain, Error, Result};
use crate::params::{Hurst, PhysicalParams};
use crate::specfun::mittag_leffler::ml_neg;
use crate::specfun::quadrature::{
    fourier_integral, one_minus_cos_integral, Oscillator, Shape, Tolerance,
};
use crate::trace::{CovarianceCurve, CurveKind, SpectralCurve};

/// Relative accuracy requested from the spectral quadratures.
pub const QUAD_REL_TOL: f64 = 1e-9;

/// Quantities shared by the spectral formulas.
#[derive(Clone, Copy, Debug)]
struct Consts {
    m: f64,
    zeta: f64,
    kbt: f64,
    h: f64,
    /// `zeta * Gamma(2h + 1)`.
    zg: f64,
    sin: f64,
    cos: f64,
}

impl Consts {
    fn new(p: &PhysicalParams, h: Hurst) -> Result<Self> {
        let h = h.require_subdiffusive()?.value();
        let (sin, cos) = (h * PI).sin_cos();
        Ok(Consts {
            m: p.m,
            zeta: p.zeta,
            kbt: p.kbt,
            h,
            zg: p.zeta * gamma(2.0 * h + 1.0),
            sin,
            cos,
        })
    }

    /// `zeta K~(w)` for `w > 0`.
    fn friction_spectrum(&self, w: f64) -> f64 {
        2.0 * self.zg * self.sin * w.powf(1.0 - 2.0 * self.h)
    }

    fn free_velocity(&self, w: f64) -> f64 {
        let a = self.zg * w.powf(1.0 - 2.0 * self.h);
        let mw = self.m * w;
        let den = a * a + 2.0 * a * mw * self.cos + mw * mw;
        self.kbt * self.friction_spectrum(w) / den
    }

    /// Frequency where inertia and friction balance, `(zeta Gamma / m)^(1/2h)`.
    fn crossover(&self) -> f64 {
        (self.zg / self.m).powf(0.5 / self.h)
    }

    /// `k_B T zeta K~(w) / |D(w)|^2` for the harmonic particle.
    fn harmonic_displacement(&self, psi: f64, w: f64) -> f64 {
        let a = self.zg * w.powf(2.0 - 2.0 * self.h);
        let re = self.m * psi - self.m * w * w - a * self.cos;
        let im = a * self.sin;
        self.kbt * self.friction_spectrum(w) / (re * re + im * im)
    }
}

fn check_frequency(w: f64) -> Result<f64> {
    if w == 0.0 {
        Err(Error::Singular(
            "spectral density is singular at zero frequency".into(),
        ))
    } else if !w.is_finite() {
        Err(domain(format!("frequency must be finite, got {w}")))
    } else {
        Ok(w.abs())
    }
}

fn check_lag(t: f64) -> Result<f64> {
    if t.is_finite() {
        Ok(t)
    } else {
        Err(domain(format!("lag must be finite, got {t}")))
    }
}

/// Spectral density of the free-particle velocity,
/// `k_B T zeta K~(w) / |zeta K~+(w) - i m w|^2`.
pub fn velocity_spectral_density(p: &PhysicalParams, h: Hurst, w: f64) -> Result<f64> {
    p.require_free()?;
    let c = Consts::new(p, h)?;
    Ok(c.free_velocity(check_frequency(w)?))
}

fn velocity_shape(c: &Consts) -> Shape {
    Shape::new(2.0 * c.h - 1.0, 1.0 + 2.0 * c.h).breakpoint(c.crossover())
}

/// Stationary velocity autocovariance `C_v(t) = (1/pi) ∫_0^∞ S_v(w) cos(tw) dw`.
pub fn velocity_autocovariance(p: &PhysicalParams, h: Hurst, t: f64) -> Result<f64> {
    p.require_free()?;
    let c = Consts::new(p, h)?;
    let t = check_lag(t)?.abs();
    let scale = c.kbt / c.m;
    let tol = Tolerance::new(1e-11 * scale * PI, QUAD_REL_TOL);
    let e = fourier_integral(
        |w| c.free_velocity(w),
        t,
        Oscillator::Cos,
        &velocity_shape(&c),
        tol,
    )?;
    Ok(e.value / PI)
}

/// Mean squared displacement of the free particle started at the origin,
/// `(2/pi) ∫_0^∞ S_v(w) (1 - cos tw) / w^2 dw`.
pub fn msd_free(p: &PhysicalParams, h: Hurst, t: f64) -> Result<f64> {
    p.require_free()?;
    let c = Consts::new(p, h)?;
    let t = check_lag(t)?;
    if t < 0.0 {
        return Err(domain(format!("time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let scale = msd_asymptote_raw(&c, t).max(c.kbt / c.m * t * t.min(1.0));
    let tol = Tolerance::new(1e-11 * scale, QUAD_REL_TOL);
    let shape = Shape::new(2.0 * c.h - 1.0, 3.0 + 2.0 * c.h).breakpoint(c.crossover());
    let e = one_minus_cos_integral(|w| c.free_velocity(w) / (w * w), t, &shape, tol)?;
    Ok(2.0 / PI * e.value)
}

fn msd_prefactor(h: f64) -> f64 {
    (2.0 * h * PI).sin() / (PI * h * (1.0 - 2.0 * h) * (2.0 - 2.0 * h))
}

fn msd_asymptote_raw(c: &Consts, t: f64) -> f64 {
    c.kbt / c.zeta * msd_prefactor(c.h) * t.powf(2.0 - 2.0 * c.h)
}

/// Long-time law `(k_B T/zeta) sin(2 h pi) / (pi h (1-2h)(2-2h)) t^(2-2h)`.
pub fn msd_asymptote(p: &PhysicalParams, h: Hurst, t: f64) -> Result<f64> {
    p.validate()?;
    let c = Consts::new(p, h)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain(format!("time must be positive, got {t}")));
    }
    Ok(msd_asymptote_raw(&c, t))
}

/// The four stationary covariances of the harmonic particle at lag `t`.
///
/// `xv` and `vx` are both the sine integral `(1/pi) ∫ w S(w) sin(tw) dw`,
/// which is `E[v(0) x(t)] = -d/dt E[x(0) x(t)]`. The physical
/// `E[x(0) v(t)]` is its negative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicCovariances {
    pub xx: f64,
    pub xv: f64,
    pub vx: f64,
    pub vv: f64,
}

impl HarmonicCovariances {
    /// Lag-`t` block `E[X(t) X(0)^T]` for `X = (x, v)`, row-major.
    pub fn lag_block(&self) -> [f64; 4] {
        [self.xx, self.vx, -self.vx, self.vv]
    }
}

fn harmonic_shape(c: &Consts, psi: f64, origin: f64, decay: f64) -> Shape {
    let tau = (c.zg / (c.m * psi)).powf(1.0 / (2.0 - 2.0 * c.h));
    Shape::new(origin, decay)
        .breakpoint(psi.sqrt())
        .breakpoint(c.crossover())
        .breakpoint(1.0 / tau)
}

/// Theorem-style spectral integrals for the harmonic particle.
pub fn harmonic_covariances(p: &PhysicalParams, h: Hurst, t: f64) -> Result<HarmonicCovariances> {
    let psi = p.require_psi()?;
    let c = Consts::new(p, h)?;
    let t = check_lag(t)?;
    let sign = if t < 0.0 { -1.0 } else { 1.0 };
    let t = t.abs();
    let sx = c.kbt / (c.m * psi);
    let sv = c.kbt / c.m;
    let s = |w: f64| c.harmonic_displacement(psi, w);
    let hh = c.h;
    let xx = fourier_integral(
        s,
        t,
        Oscillator::Cos,
        &harmonic_shape(&c, psi, 1.0 - 2.0 * hh, 3.0 + 2.0 * hh),
        Tolerance::new(1e-11 * sx * PI, QUAD_REL_TOL),
    )?
    .value
        / PI;
    let vv = fourier_integral(
        |w| w * w * s(w),
        t,
        Oscillator::Cos,
        &harmonic_shape(&c, psi, 3.0 - 2.0 * hh, 1.0 + 2.0 * hh),
        Tolerance::new(1e-11 * sv * PI, QUAD_REL_TOL),
    )?
    .value
        / PI;
    let vx = if t == 0.0 {
        0.0
    } else {
        sign * fourier_integral(
            |w| w * s(w),
            t,
            Oscillator::Sin,
            &harmonic_shape(&c, psi, 2.0 - 2.0 * hh, 2.0 + 2.0 * hh),
            Tolerance::new(1e-11 * (sx * sv).sqrt() * PI, QUAD_REL_TOL),
        )?
        .value
            / PI
    };
    Ok(HarmonicCovariances { xx, xv: vx, vx, vv })
}

/// Relaxation time `tau = (zeta Gamma(2h+1) / (m psi))^(1/(2-2h))`.
pub fn tau(p: &PhysicalParams, h: Hurst) -> Result<f64> {
    let psi = p.require_psi()?;
    let c = Consts::new(p, h)?;
    Ok((c.zg / (c.m * psi)).powf(1.0 / (2.0 - 2.0 * c.h)))
}

/// Overdamped displacement covariance
/// `(k_B T / m psi) E_{2-2h}(-(|t|/tau)^(2-2h))`.
pub fn overdamped_autocovariance(p: &PhysicalParams, h: Hurst, t: f64) -> Result<f64> {
    let var = p.displacement_variance()?;
    let tau = tau(p, h)?;
    let t = check_lag(t)?.abs();
    let alpha = h.msd_exponent();
    Ok(var * ml_neg(alpha, (t / tau).powf(alpha)))
}

/// Laplace transform of the overdamped displacement covariance,
/// `(k_B T / m psi) / (s + s^(2h-1) tau^(-(2-2h)))`, `s > 0`.
pub fn overdamped_laplace(p: &PhysicalParams, h: Hurst, s: f64) -> Result<f64> {
    let var = p.displacement_variance()?;
    let tau = tau(p, h)?;
    if !(s > 0.0 && s.is_finite()) {
        return Err(domain(format!(
            "Laplace variable must be positive, got {s}"
        )));
    }
    let alpha = h.msd_exponent();
    Ok(var / (s + s.powf(1.0 - alpha) * tau.powf(-alpha)))
}

/// Overdamped spectral density, `w > 0`:
/// `(k_B T/m psi) 2 sin(h pi) (tau w)^(2-2h) / w / (1 - 2 cos(h pi)(tau w)^(2-2h) + (tau w)^(4-4h))`.
pub fn overdamped_spectral_density(p: &PhysicalParams, h: Hurst, w: f64) -> Result<f64> {
    let var = p.displacement_variance()?;
    let tau = tau(p, h)?;
    if !(w > 0.0 && w.is_finite()) {
        return Err(domain(format!("frequency must be positive, got {w}")));
    }
    let hv = h.value();
    let (sin, cos) = (hv * PI).sin_cos();
    let y = (tau * w).powf(2.0 - 2.0 * hv);
    Ok(var * 2.0 * sin * y / w / (1.0 - 2.0 * cos * y + y * y))
}

/// Curves the analytic layer can tabulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyticCurve {
    FreeVelocity,
    FreeMsd,
    MsdAsymptote,
    HarmonicXx,
    HarmonicVv,
    HarmonicVx,
    Overdamped,
}

impl AnalyticCurve {
    fn kind(self) -> CurveKind {
        match self {
            AnalyticCurve::FreeVelocity | AnalyticCurve::HarmonicVv => CurveKind::Velocity,
            AnalyticCurve::FreeMsd | AnalyticCurve::MsdAsymptote => CurveKind::Msd,
            AnalyticCurve::HarmonicXx | AnalyticCurve::Overdamped => CurveKind::Displacement,
            AnalyticCurve::HarmonicVx => CurveKind::Cross,
        }
    }
}

/// Evaluates `curve` on the lag grid, in parallel over grid points.
pub fn tabulate(
    p: &PhysicalParams,
    h: Hurst,
    curve: AnalyticCurve,
    lags: &[f64],
) -> Result<CovarianceCurve> {
    let values = lags
        .par_iter()
        .map(|&t| match curve {
            AnalyticCurve::FreeVelocity => velocity_autocovariance(p, h, t),
            AnalyticCurve::FreeMsd => msd_free(p, h, t),
            AnalyticCurve::MsdAsymptote => msd_asymptote(p, h, t),
            AnalyticCurve::HarmonicXx => harmonic_covariances(p, h, t).map(|c| c.xx),
            AnalyticCurve::HarmonicVv => harmonic_covariances(p, h, t).map(|c| c.vv),
            AnalyticCurve::HarmonicVx => harmonic_covariances(p, h, t).map(|c| c.vx),
            AnalyticCurve::Overdamped => overdamped_autocovariance(p, h, t),
        })
        .collect::<Result<Vec<f64>>>()?;
    CovarianceCurve::new(lags.to_vec(), values, curve.kind())
}

/// Spectral densities the analytic layer can tabulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyticSpectrum {
    FreeVelocity,
    HarmonicDisplacement,
    Overdamped,
}

pub fn tabulate_spectrum(
    p: &PhysicalParams,
    h: Hurst,
    which: AnalyticSpectrum,
    omegas: &[f64],
) -> Result<SpectralCurve> {
    let values = omegas
        .iter()
        .map(|&w| match which {
            AnalyticSpectrum::FreeVelocity => velocity_spectral_density(p, h, w),
            AnalyticSpectrum::HarmonicDisplacement => {
                let psi = p.require_psi()?;
                let c = Consts::new(p, h)?;
                Ok(c.harmonic_displacement(psi, check_frequency(w)?))
            }
            AnalyticSpectrum::Overdamped => overdamped_spectral_density(p, h, w),
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SpectralCurve {
        omegas: omegas.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> PhysicalParams {
        PhysicalParams::free(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn free_quantities_reject_potential() {
        let p = PhysicalParams::harmonic(1.0, 1.0, 1.0, 1.0).unwrap();
        let h = Hurst::new(0.75).unwrap();
        assert!(velocity_autocovariance(&p, h, 0.0).is_err());
        assert!(overdamped_autocovariance(&unit(), h, 0.0).is_err());
    }

    #[test]
    fn msd_starts_at_zero() {
        assert_eq!(
            msd_free(&unit(), Hurst::new(0.7).unwrap(), 0.0).unwrap(),
            0.0
        );
    }
}
