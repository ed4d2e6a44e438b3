//! Fractional Gaussian noise, fractional Brownian motion and the memory kernel.

use crate::error::{input, Error, Result};
use crate::params::Hurst;
use crate::rng::{substream, GENERATOR_ID};
use crate::synthesis::StationarySampler;
use crate::trace::Trace;

/// Autocovariance of unit-variance fGn,
/// `(|k+1|^2h + |k-1|^2h - 2|k|^2h) / 2`.
pub fn fgn_autocovariance(h: Hurst, k: u64) -> f64 {
    let two_h = 2.0 * h.value();
    let k = k as f64;
    if k == 0.0 {
        return 1.0;
    }
    if k > 1e3 {
        // Second difference by its convergent binomial series, free of cancellation.
        let mut sum = 0.0;
        let mut coef = 0.5 * two_h * (two_h - 1.0);
        let inv2 = 1.0 / (k * k);
        let mut pow = inv2;
        let mut j = 2.0;
        while j < 40.0 {
            let term = coef * pow;
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
            coef *= (two_h - j) * (two_h - j - 1.0) / ((j + 1.0) * (j + 2.0));
            pow *= inv2;
            j += 2.0;
        }
        return k.powf(two_h) * sum;
    }
    0.5 * ((k + 1.0).powf(two_h) + (k - 1.0).abs().powf(two_h) - 2.0 * k.powf(two_h))
}

/// Memory kernel `K(t) = 2h(2h - 1)|t|^(2h-2)`.
pub fn kernel_k(h: Hurst, t: f64) -> Result<f64> {
    let h = h.require_subdiffusive()?.value();
    if t == 0.0 {
        return Err(Error::Singular(
            "the memory kernel diverges at t = 0".into(),
        ));
    }
    if !t.is_finite() {
        return Err(input("kernel lag must be finite"));
    }
    Ok(2.0 * h * (2.0 * h - 1.0) * t.abs().powf(2.0 * h - 2.0))
}

/// Precomputed sampler for fGn paths of a fixed length, for ensembles.
pub struct FgnSampler {
    h: Hurst,
    inner: StationarySampler,
}

impl FgnSampler {
    pub fn new(h: Hurst, n: usize) -> Result<Self> {
        Ok(FgnSampler {
            h,
            inner: StationarySampler::new(n, |k| fgn_autocovariance(h, k as u64))?,
        })
    }

    /// Path `index` of the run `seed`; unit spacing.
    pub fn path(&self, seed: u64, index: u64) -> Trace {
        let mut rng = substream(seed, index);
        let values = self.inner.sample(&mut rng);
        Trace::new(1.0, values)
            .expect("sampler yields a non-empty path")
            .with_meta("seed", seed)
            .with_meta("path", index)
            .with_meta("generator", GENERATOR_ID)
            .with_meta("h", self.h.value())
    }
}

/// `n` unit-variance fGn increments, a pure function of `(h, n, seed)`.
pub fn sample_fgn(h: Hurst, n: usize, seed: u64) -> Result<Trace> {
    if n == 0 {
        return Err(input("sample count must be at least 1"));
    }
    Ok(FgnSampler::new(h, n)?.path(seed, 0))
}

/// Fractional Brownian motion on the grid `0, dt, ..., n dt` from fGn
/// increments: `B(0) = 0`, `B(k dt) = dt^h * (x_1 + ... + x_k)`.
pub fn fbm_from_fgn(increments: &Trace, dt: f64) -> Result<Trace> {
    let h = increments
        .hurst()
        .ok_or_else(|| input("increments carry no Hurst exponent in their metadata"))?;
    Hurst::new(h)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(input(format!("step must be positive, got {dt}")));
    }
    let scale = dt.powf(h);
    let mut out = Vec::with_capacity(increments.len() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for x in increments.values() {
        acc += x;
        out.push(acc * scale);
    }
    let mut trace = Trace::new(dt, out)?;
    trace.meta = increments.meta.clone();
    Ok(trace.with_meta("dt", dt))
}
