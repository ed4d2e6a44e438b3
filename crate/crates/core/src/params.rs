//! Physical constants of the model and the Hurst exponent.

use crate::error::{domain, Result};

/// Hurst exponent of the driving noise.
///
/// Any value in `(0, 1)` is accepted for noise generation. The Langevin
/// layers call [`Hurst::require_subdiffusive`], which additionally rejects
/// `h <= 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Hurst(f64);

impl Hurst {
    pub fn new(h: f64) -> Result<Self> {
        if h.is_finite() && h > 0.0 && h < 1.0 {
            Ok(Hurst(h))
        } else {
            Err(domain(format!(
                "Hurst exponent must lie in (0, 1), got {h}"
            )))
        }
    }

    /// Shorthand for `Hurst::new(h)?.require_subdiffusive()`.
    pub fn subdiffusive(h: f64) -> Result<Self> {
        Hurst::new(h)?.require_subdiffusive()
    }

    pub fn require_subdiffusive(self) -> Result<Self> {
        if self.0 > 0.5 {
            Ok(self)
        } else {
            Err(domain(format!(
                "the Langevin model needs 1/2 < h < 1, got {}",
                self.0
            )))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Exponent `2 - 2h` of the subdiffusive mean squared displacement, which
    /// is also the Mittag-Leffler index of the overdamped covariance.
    #[inline]
    pub fn msd_exponent(self) -> f64 {
        2.0 - 2.0 * self.0
    }
}

/// The `(m, zeta, k_B T, psi)` quadruple.
///
/// `psi` is the strength of the harmonic potential `U(x) = m psi x^2 / 2`;
/// it is absent for a free particle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    pub m: f64,
    pub zeta: f64,
    pub kbt: f64,
    pub psi: Option<f64>,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl PhysicalParams {
    pub fn free(m: f64, zeta: f64, kbt: f64) -> Result<Self> {
        Ok(PhysicalParams {
            m: positive("mass", m)?,
            zeta: positive("friction", zeta)?,
            kbt: positive("thermal energy", kbt)?,
            psi: None,
        })
    }

    pub fn harmonic(m: f64, zeta: f64, kbt: f64, psi: f64) -> Result<Self> {
        Ok(PhysicalParams {
            psi: Some(positive("potential strength", psi)?),
            ..PhysicalParams::free(m, zeta, kbt)?
        })
    }

    /// Re-checks the invariants; useful for values built with struct syntax.
    pub fn validate(&self) -> Result<()> {
        positive("mass", self.m)?;
        positive("friction", self.zeta)?;
        positive("thermal energy", self.kbt)?;
        if let Some(psi) = self.psi {
            positive("potential strength", psi)?;
        }
        Ok(())
    }

    pub(crate) fn require_free(&self) -> Result<()> {
        self.validate()?;
        match self.psi {
            None => Ok(()),
            Some(_) => Err(domain(
                "free-particle quantity requested with a potential present",
            )),
        }
    }

    pub(crate) fn require_psi(&self) -> Result<f64> {
        self.validate()?;
        self.psi
            .ok_or_else(|| domain("harmonic quantity requested without a potential strength psi"))
    }

    /// Stationary displacement variance `k_B T / (m psi)` of the confined models.
    pub fn displacement_variance(&self) -> Result<f64> {
        Ok(self.kbt / (self.m * self.require_psi()?))
    }

    /// Stationary velocity variance `k_B T / m`.
    pub fn velocity_variance(&self) -> f64 {
        self.kbt / self.m
    }
}
