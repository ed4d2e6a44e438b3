use crate::error::{input, Result};
use crate::trace::Trace;

/// Boltzmann-inverted potential on bin centres, shifted to a zero minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialCurve {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub counts: Vec<usize>,
    pub bin_width: f64,
}

impl PotentialCurve {
    /// Count-weighted least-squares parabola `u = a x^2 + b x + c`,
    /// returned as `(a, b, c)`.
    pub fn fit_quadratic(&self) -> Result<(f64, f64, f64)> {
        if self.x.len() < 3 {
            return Err(input("quadratic fit needs at least three occupied bins"));
        }
        // Normal equations on centred abscissae for conditioning.
        let wsum: f64 = self.counts.iter().map(|&c| c as f64).sum();
        let xm = self
            .x
            .iter()
            .zip(&self.counts)
            .map(|(x, &c)| x * c as f64)
            .sum::<f64>()
            / wsum;
        let mut m = nalgebra::Matrix3::<f64>::zeros();
        let mut r = nalgebra::Vector3::<f64>::zeros();
        for ((x, u), &c) in self.x.iter().zip(&self.u).zip(&self.counts) {
            let w = c as f64;
            let z = x - xm;
            let basis = [z * z, z, 1.0];
            for i in 0..3 {
                r[i] += w * basis[i] * u;
                for j in 0..3 {
                    m[(i, j)] += w * basis[i] * basis[j];
                }
            }
        }
        let sol = m
            .lu()
            .solve(&r)
            .ok_or_else(|| input("degenerate quadratic fit"))?;
        let (a, bz, cz) = (sol[0], sol[1], sol[2]);
        // Undo the centring.
        Ok((a, bz - 2.0 * a * xm, a * xm * xm - bz * xm + cz))
    }

    /// Second derivative `2a` of the fitted parabola.
    pub fn curvature(&self) -> Result<f64> {
        Ok(2.0 * self.fit_quadratic()?.0)
    }
}

/// Freedman-Diaconis bin count for the range `mean +- 4 sd`.
pub fn freedman_diaconis_bins(trace: &Trace) -> usize {
    let mut v = trace.values().to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let q = |p: f64| {
        let idx = p * (v.len() - 1) as f64;
        let (i, f) = (idx.floor() as usize, idx.fract());
        if i + 1 < v.len() {
            v[i] * (1.0 - f) + v[i + 1] * f
        } else {
            v[i]
        }
    };
    let iqr = q(0.75) - q(0.25);
    let width = 2.0 * iqr / (v.len() as f64).cbrt();
    let span = 8.0 * trace.variance().sqrt();
    if !(width > 0.0) {
        return 10;
    }
    ((span / width).ceil() as usize).clamp(10, 1000)
}

/// `U(x) = -k_B T log p(x)` from a histogram of the trace on `n_bins`
/// equal bins over `mean +- 4 sd`. Empty bins are left out.
pub fn reconstruct_potential(trace: &Trace, n_bins: usize, kbt: f64) -> Result<PotentialCurve> {
    if n_bins < 10 {
        return Err(input("use at least 10 bins"));
    }
    if trace.len() < 10 * n_bins {
        return Err(input(format!(
            "{} points are too few for {n_bins} bins (at least {} needed)",
            trace.len(),
            10 * n_bins
        )));
    }
    if !(kbt > 0.0) {
        return Err(input("thermal energy must be positive"));
    }
    let mean = trace.mean();
    let sd = trace.variance().sqrt();
    let first = trace.values()[0];
    if !(sd > 0.0) || trace.values().iter().all(|v| *v == first) {
        return Err(input("trace has no spread; the potential is undefined"));
    }
    let lo = mean - 4.0 * sd;
    let width = 8.0 * sd / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for v in trace.values() {
        let b = ((v - lo) / width).floor();
        if b >= 0.0 && (b as usize) < n_bins {
            counts[b as usize] += 1;
        }
    }
    let total = trace.len() as f64;
    let mut xs = Vec::new();
    let mut us = Vec::new();
    let mut cs = Vec::new();
    for (i, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let density = c as f64 / (total * width);
        xs.push(lo + (i as f64 + 0.5) * width);
        us.push(-kbt * density.ln());
        cs.push(c);
    }
    let umin = us.iter().copied().fold(f64::INFINITY, f64::min);
    for u in us.iter_mut() {
        *u -= umin;
    }
    Ok(PotentialCurve {
        x: xs,
        u: us,
        counts: cs,
        bin_width: width,
    })
}
