//! Fluorescence-lifetime observable `lambda(t) = k0 exp(beta (x_eq + x(t)))`
//! and its multi-time correlations for a stationary Gaussian `x`.
//!
//! All formulas take the displacement covariance as a closure `C(t)`.
//! Brackets are assembled from `expm1` so that they stay accurate when the
//! correlations are weak, and prefactors are formed in log space.

use crate::error::{domain, input, Result};
use crate::trace::Trace;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LifetimeParams {
    pub k0: f64,
    pub beta: f64,
    pub x_eq: f64,
}

impl LifetimeParams {
    pub fn new(k0: f64, beta: f64, x_eq: f64) -> Result<Self> {
        if !(k0 > 0.0 && k0.is_finite()) {
            return Err(domain(format!(
                "rate prefactor k0 must be positive, got {k0}"
            )));
        }
        if !beta.is_finite() || !x_eq.is_finite() {
            return Err(domain("beta and x_eq must be finite"));
        }
        Ok(LifetimeParams { k0, beta, x_eq })
    }

    /// `log(k0^n e^{n beta x_eq})`.
    fn log_scale(&self, n: f64) -> f64 {
        n * (self.k0.ln() + self.beta * self.x_eq)
    }

    /// Stationary mean `k0 exp(beta x_eq + beta^2 C(0) / 2)`.
    pub fn mean<C: Fn(f64) -> f64>(&self, cov: C) -> f64 {
        (self.log_scale(1.0) + 0.5 * self.beta * self.beta * cov(0.0)).exp()
    }
}

/// Pointwise `k0 exp(beta (x_eq + x_k))`.
pub fn lifetime_map(x: &Trace, lp: &LifetimeParams) -> Trace {
    let values = x
        .values()
        .iter()
        .map(|v| lp.k0 * (lp.beta * (lp.x_eq + v)).exp())
        .collect();
    let mut t = Trace::with_start(x.dt(), x.start_time(), values).expect("same shape as input");
    t.meta = x.meta.clone();
    t.with_meta("quantity", "lambda")
        .with_meta("k0", lp.k0)
        .with_meta("beta", lp.beta)
        .with_meta("x_eq", lp.x_eq)
}

/// `E[exp(A sum_i x(t_i))] = exp{(n/2) A^2 C(0) + A^2 sum_{i<j} C(t_j - t_i)}`.
pub fn lognormal_moment<C: Fn(f64) -> f64>(a: f64, cov: C, times: &[f64]) -> Result<f64> {
    Ok(log_lognormal_moment(a, &cov, times)?.exp())
}

fn log_lognormal_moment<C: Fn(f64) -> f64>(a: f64, cov: &C, times: &[f64]) -> Result<f64> {
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(input("times must be sorted in non-decreasing order"));
    }
    let n = times.len() as f64;
    let a2 = a * a;
    let mut s = 0.5 * n * a2 * cov(0.0);
    for j in 0..times.len() {
        for i in 0..j {
            s += a2 * cov(times[j] - times[i]);
        }
    }
    Ok(s)
}

/// `E[d lambda(0) d lambda(t)] = k0^2 e^{2 beta x_eq + beta^2 C(0)} (e^{beta^2 C(t)} - 1)`.
pub fn lifetime_autocov<C: Fn(f64) -> f64>(lp: &LifetimeParams, cov: C, t: f64) -> f64 {
    let b2 = lp.beta * lp.beta;
    (lp.log_scale(2.0) + b2 * cov(0.0)).exp() * (b2 * cov(t.abs())).exp_m1()
}

/// `E[d lambda(0) d lambda(t1) d lambda(t1 + t2)]`.
pub fn three_step_corr<C: Fn(f64) -> f64>(lp: &LifetimeParams, cov: C, t1: f64, t2: f64) -> f64 {
    let b2 = lp.beta * lp.beta;
    let a = b2 * cov(t1);
    let b = b2 * cov(t2);
    let c = b2 * cov(t1 + t2);
    let bracket = (a + b + c).exp_m1() - a.exp_m1() - b.exp_m1() - c.exp_m1();
    (lp.log_scale(3.0) + 1.5 * b2 * cov(0.0)).exp() * bracket
}

/// `E[d lambda(0) d lambda(t1) d lambda(t1 + t2) d lambda(t1 + t2 + t3)]`.
pub fn four_step_corr<C: Fn(f64) -> f64>(
    lp: &LifetimeParams,
    cov: C,
    t1: f64,
    t2: f64,
    t3: f64,
) -> f64 {
    let b2 = lp.beta * lp.beta;
    let a1 = b2 * cov(t1);
    let a2 = b2 * cov(t2);
    let a3 = b2 * cov(t3);
    let a12 = b2 * cov(t1 + t2);
    let a23 = b2 * cov(t2 + t3);
    let a123 = b2 * cov(t1 + t2 + t3);
    let all = a1 + a2 + a3 + a12 + a23 + a123;
    let triples = [
        a1 + a2 + a12,
        a1 + a23 + a123,
        a12 + a3 + a123,
        a2 + a3 + a23,
    ];
    let singles = [a1, a2, a3, a12, a23, a123];
    let bracket = all.exp_m1() - triples.iter().map(|x| x.exp_m1()).sum::<f64>()
        + singles.iter().map(|x| x.exp_m1()).sum::<f64>();
    (lp.log_scale(4.0) + 2.0 * b2 * cov(0.0)).exp() * bracket
}

/// Centered moment `E[prod_i (lambda(t_i) - E lambda)]` by expanding the
/// product over subsets and evaluating each raw moment with
/// [`lognormal_moment`]. Independent of the closed forms above; practical
/// for a handful of times.
pub fn centered_moment<C: Fn(f64) -> f64>(
    lp: &LifetimeParams,
    cov: C,
    times: &[f64],
) -> Result<f64> {
    let n = times.len();
    if n > 20 {
        return Err(input("centered moment expansion is limited to 20 times"));
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(input("times must be sorted in non-decreasing order"));
    }
    let mu = lp.mean(&cov);
    let mut total = 0.0;
    let mut subset = Vec::with_capacity(n);
    for mask in 0u32..(1 << n) {
        subset.clear();
        for (i, t) in times.iter().enumerate() {
            if mask & (1 << i) != 0 {
                subset.push(*t);
            }
        }
        let k = subset.len();
        let raw = (lp.log_scale(k as f64) + log_lognormal_moment(lp.beta, &cov, &subset)?).exp();
        total += raw * (-mu).powi((n - k) as i32);
    }
    Ok(total)
}

/// Rows `(t, E[dl(0) dl(t) dl(3t)], E[dl(0) dl(2t) dl(3t)])`; the model
/// predicts equal columns.
pub fn time_symmetry_pairs<C: Fn(f64) -> f64>(
    lp: &LifetimeParams,
    cov: C,
    ts: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    if ts.iter().any(|t| !(*t > 0.0)) {
        return Err(input("time grid must be positive"));
    }
    Ok(ts
        .iter()
        .map(|&t| {
            (
                t,
                three_step_corr(lp, &cov, t, 2.0 * t),
                three_step_corr(lp, &cov, 2.0 * t, t),
            )
        })
        .collect())
}

/// Empirical `mean of prod_i d lambda(k_i)` from a trace with lag offsets
/// `offsets` (in samples, starting with 0), after removing the sample mean.
pub fn empirical_multi_time(trace: &Trace, offsets: &[usize]) -> Result<f64> {
    let x = trace.values();
    let span = *offsets.iter().max().unwrap_or(&0);
    if span >= x.len() {
        return Err(input("lag offsets exceed the trace length"));
    }
    let mean = trace.mean();
    let count = x.len() - span;
    let mut s = 0.0;
    for i in 0..count {
        s += offsets.iter().map(|&k| x[i + k] - mean).product::<f64>();
    }
    Ok(s / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_covariance_gives_zero_correlations() {
        let lp = LifetimeParams::new(2.0, 1.3, 0.4).unwrap();
        let c = |_t: f64| 0.0;
        assert_eq!(lifetime_autocov(&lp, c, 1.0), 0.0);
        assert_eq!(three_step_corr(&lp, c, 1.0, 2.0), 0.0);
        assert_eq!(four_step_corr(&lp, c, 1.0, 2.0, 0.5), 0.0);
    }

    #[test]
    fn unsorted_times_rejected() {
        assert!(lognormal_moment(1.0, |_t| 1.0, &[1.0, 0.5]).is_err());
    }
}
