use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{input, Error, Result};
use crate::trace::{CovarianceCurve, CurveKind, Trace};

/// Biased empirical autocovariance
/// `C(k) = (1/n) sum_i (x_i - mean)(x_{i+k} - mean)` for `k = 0..=max_lag`.
///
/// The divisor `n` keeps the sequence positive semidefinite.
pub fn empirical_autocorrelation(trace: &Trace, max_lag: usize) -> Result<CovarianceCurve> {
    let n = trace.len();
    if max_lag >= n {
        return Err(input(format!(
            "max lag {max_lag} must be below the trace length {n}"
        )));
    }
    let sums = lag_products(trace.values(), trace.mean(), max_lag);
    let values = sums.iter().map(|s| s / n as f64).collect();
    let lags = (0..=max_lag).map(|k| k as f64 * trace.dt()).collect();
    CovarianceCurve::new(lags, values, kind_of(trace))
}

/// Autocovariance of a known zero-mean process from independent paths:
/// each path gives `(1/(n-k)) sum_i x_i x_{i+k}` and the curve is their
/// average, with standard errors from the spread across paths.
///
/// No mean is estimated, so long-memory paths carry no bias from it.
pub fn ensemble_autocovariance(traces: &[Trace], max_lag: usize) -> Result<CovarianceCurve> {
    if traces.len() < 2 {
        return Err(input("an ensemble autocovariance needs at least 2 traces"));
    }
    let (n, dt) = (traces[0].len(), traces[0].dt());
    if traces
        .iter()
        .any(|t| t.len() != n || (t.dt() - dt).abs() > 1e-12 * dt)
    {
        return Err(Error::GridMismatch(
            "ensemble traces must share length and step".into(),
        ));
    }
    if max_lag >= n {
        return Err(input(format!(
            "max lag {max_lag} must be below the trace length {n}"
        )));
    }
    let per_path: Vec<Vec<f64>> = traces
        .par_iter()
        .map(|t| {
            lag_products(t.values(), 0.0, max_lag)
                .iter()
                .enumerate()
                .map(|(k, s)| s / (n - k) as f64)
                .collect()
        })
        .collect();
    let count = traces.len() as f64;
    let mut values = vec![0.0; max_lag + 1];
    let mut se = vec![0.0; max_lag + 1];
    for k in 0..=max_lag {
        let m = per_path.iter().map(|r| r[k]).sum::<f64>() / count;
        let v = per_path.iter().map(|r| (r[k] - m).powi(2)).sum::<f64>() / (count - 1.0);
        values[k] = m;
        se[k] = (v / count).sqrt();
    }
    let lags = (0..=max_lag).map(|k| k as f64 * dt).collect();
    let mut c = CovarianceCurve::new(lags, values, kind_of(&traces[0]))?;
    c.stderr = Some(se);
    Ok(c)
}

fn kind_of(trace: &Trace) -> CurveKind {
    match trace.meta.get("quantity").map(String::as_str) {
        Some("v") => CurveKind::Velocity,
        Some("lambda") => CurveKind::Lifetime,
        _ => CurveKind::Displacement,
    }
}

/// `sum_i (x_i - mean)(x_{i+k} - mean)` for `k = 0..=max_lag`, by FFT.
fn lag_products(x: &[f64], mean: f64, max_lag: usize) -> Vec<f64> {
    let size = (2 * x.len()).next_power_of_two();
    let mut buf: Vec<Complex64> = x
        .iter()
        .map(|v| Complex64::new(v - mean, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex64::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    buf[..=max_lag].iter().map(|c| c.re / size as f64).collect()
}

/// Direct `O(n * max_lag)` evaluation of the same estimator.
pub fn empirical_autocorrelation_direct(trace: &Trace, max_lag: usize) -> Result<Vec<f64>> {
    let n = trace.len();
    if max_lag >= n {
        return Err(input("max lag must be below the trace length"));
    }
    let x = trace.values();
    let mean = trace.mean();
    Ok((0..=max_lag)
        .map(|k| {
            (0..n - k)
                .map(|i| (x[i] - mean) * (x[i + k] - mean))
                .sum::<f64>()
                / n as f64
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_matches_direct_sum() {
        let vals: Vec<f64> = (0..37)
            .map(|i| ((i * 7 % 11) as f64).sin() + 0.1 * i as f64)
            .collect();
        let t = Trace::new(0.5, vals).unwrap();
        let a = empirical_autocorrelation(&t, 20).unwrap();
        let b = empirical_autocorrelation_direct(&t, 20).unwrap();
        for (x, y) in a.values.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(a.lags[2], 1.0);
    }
}
