use std::collections::BTreeMap;

use crate::error::{input, Result};

/// A uniformly sampled real time series.
///
/// Length, step and start time are fixed at construction. `meta` carries
/// free-form provenance (seed, generator, Hurst exponent, ...) and is what
/// the CSV layer writes as `# key=value` lines.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    dt: f64,
    start_time: f64,
    values: Vec<f64>,
    pub meta: BTreeMap<String, String>,
}

impl Trace {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self> {
        Trace::with_start(dt, 0.0, values)
    }

    pub fn with_start(dt: f64, start_time: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(input(format!("trace step must be positive, got {dt}")));
        }
        if !start_time.is_finite() {
            return Err(input("trace start time must be finite"));
        }
        if values.is_empty() {
            return Err(input("trace must contain at least one sample"));
        }
        Ok(Trace {
            dt,
            start_time,
            values,
            meta: BTreeMap::new(),
        })
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, k: usize) -> f64 {
        self.start_time + k as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |k| self.time(k))
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn seed(&self) -> Option<u64> {
        self.meta.get("seed").and_then(|s| s.parse().ok())
    }

    pub fn hurst(&self) -> Option<f64> {
        self.meta.get("h").and_then(|s| s.parse().ok())
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Variance with divisor `n`.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.values.len() as f64
    }
}

/// What a tabulated covariance describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    Velocity,
    Displacement,
    Cross,
    Lifetime,
    Msd,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Velocity => "velocity",
            CurveKind::Displacement => "displacement",
            CurveKind::Cross => "cross",
            CurveKind::Lifetime => "lifetime",
            CurveKind::Msd => "msd",
        }
    }
}

/// `C(t_k)` on an increasing grid of non-negative lags, with an optional
/// standard-error band when the curve is an estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceCurve {
    pub lags: Vec<f64>,
    pub values: Vec<f64>,
    pub stderr: Option<Vec<f64>>,
    pub kind: CurveKind,
}

impl CovarianceCurve {
    pub fn new(lags: Vec<f64>, values: Vec<f64>, kind: CurveKind) -> Result<Self> {
        if lags.len() != values.len() {
            return Err(input("lags and values differ in length"));
        }
        if lags.is_empty() {
            return Err(input("empty covariance curve"));
        }
        if lags.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(input("lags must be finite and non-negative"));
        }
        if lags.windows(2).any(|w| w[1] <= w[0]) {
            return Err(input("lags must be strictly increasing"));
        }
        Ok(CovarianceCurve {
            lags,
            values,
            stderr: None,
            kind,
        })
    }

    pub fn len(&self) -> usize {
        self.lags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lags.is_empty()
    }

    /// Lag spacing if the grid is uniform to a relative 1e-6, else `None`.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.lags.len() < 2 {
            return None;
        }
        let dt = self.lags[1] - self.lags[0];
        let ok = self
            .lags
            .windows(2)
            .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-6 * dt);
        ok.then_some(dt)
    }
}

/// Power spectrum `S(omega_k)` on positive frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCurve {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
}

/// Tabulated Laplace transform on a strictly increasing positive grid.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplaceCurve {
    s: Vec<f64>,
    values: Vec<f64>,
}

impl LaplaceCurve {
    pub fn new(s: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if s.len() != values.len() || s.is_empty() {
            return Err(input(
                "Laplace curve needs equally many s and values, at least one",
            ));
        }
        if s.iter().any(|x| !(x.is_finite() && *x > 0.0)) || s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(input(
                "Laplace grid must be positive and strictly increasing",
            ));
        }
        Ok(LaplaceCurve { s, values })
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

/// `n` points spaced logarithmically on `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
