//! Least-squares fit of the overdamped lifetime autocorrelation.
//!
//! For `x` with covariance `C(0) E_a(-(t/tau)^a)`, `a = 2 - 2h`, the
//! normalized autocorrelation of `lambda = k0 exp(beta (x_eq + x))` is
//!
//! `rho(t) = (exp(A E_a(-(t/tau)^a)) - 1) / (exp(A) - 1)`
//!
//! with `A = beta^2 k_B T / (m psi)` and
//! `tau = (r Gamma(2h+1))^(1/a)`, `r = zeta / (m psi)`. The fit runs on
//! `rho`, so any overall scale of the input leaves `(h, r, A)` unchanged;
//! the scale is reported separately as `k0^2 exp(2 beta x_eq)`.

use nalgebra::{DMatrix, DVector, Matrix3};
use rayon::prelude::*;
use statrs::function::gamma::gamma;

use crate::error::{input, Error, Result};
use crate::specfun::mittag_leffler::ml_neg;
use crate::trace::{CovarianceCurve, Trace};

#[derive(Clone, Debug, PartialEq)]
pub struct FitOptions {
    /// Starting values of `h`.
    pub h_starts: Vec<f64>,
    /// Starting values of the amplitude `A`.
    pub amp_starts: Vec<f64>,
    pub max_iter: usize,
    /// Only lags within this range enter the objective.
    pub lag_range: Option<(f64, f64)>,
    /// Holds `A` at this value instead of fitting it.
    pub amplitude: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            h_starts: (0..9).map(|i| 0.55 + 0.05 * i as f64).collect(),
            amp_starts: vec![0.3, 1.0, 3.0],
            max_iter: 300,
            lag_range: None,
            amplitude: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub h_hat: f64,
    /// `zeta / (m psi)`.
    pub ratio_hat: f64,
    /// Relaxation time implied by `h_hat` and `ratio_hat`.
    pub tau_hat: f64,
    /// `beta^2 k_B T / (m psi)`.
    pub amp_hat: f64,
    /// `k0^2 exp(2 beta x_eq)` recovered from the zero-lag value.
    pub scale_hat: f64,
    pub residual_norm: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Asymptotic covariance of `(h, ratio, amp)`.
    pub covariance: [[f64; 3]; 3],
    /// Starting `h` of the winning run.
    pub start_h: f64,
}

/// Relaxation time `(ratio Gamma(2h+1))^(1/(2-2h))`.
pub fn tau_from_ratio(h: f64, ratio: f64) -> f64 {
    (ratio * gamma(2.0 * h + 1.0)).powf(1.0 / (2.0 - 2.0 * h))
}

/// Normalized lifetime autocorrelation `rho(t)` of the overdamped model.
pub fn normalized_lifetime_model(h: f64, ratio: f64, amp: f64, t: f64) -> f64 {
    let alpha = 2.0 - 2.0 * h;
    let tau = tau_from_ratio(h, ratio);
    let e = ml_neg(alpha, (t.abs() / tau).powf(alpha));
    (amp * e).exp_m1() / amp.exp_m1()
}

fn sigmoid(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

fn unpack(theta: &[f64; 3]) -> (f64, f64, f64) {
    (
        0.5 + 0.5 * sigmoid(theta[0]),
        theta[1].exp(),
        theta[2].exp(),
    )
}

fn pack(h: f64, ratio: f64, amp: f64) -> [f64; 3] {
    let s = ((h - 0.5) / 0.5).clamp(1e-9, 1.0 - 1e-9);
    [(s / (1.0 - s)).ln(), ratio.ln(), amp.ln()]
}

struct Problem {
    t: Vec<f64>,
    y: Vec<f64>,
    fixed_amp: Option<f64>,
}

impl Problem {
    fn unpack(&self, theta: &[f64; 3]) -> (f64, f64, f64) {
        let (h, r, a) = unpack(theta);
        (h, r, self.fixed_amp.unwrap_or(a))
    }

    fn free(&self) -> usize {
        if self.fixed_amp.is_some() {
            2
        } else {
            3
        }
    }

    fn residuals(&self, theta: &[f64; 3]) -> Vec<f64> {
        let (h, r, a) = self.unpack(theta);
        self.t
            .iter()
            .zip(&self.y)
            .map(|(t, y)| normalized_lifetime_model(h, r, a, *t) - y)
            .collect()
    }

    fn cost(r: &[f64]) -> f64 {
        r.iter().map(|v| v * v).sum()
    }

    fn jacobian(&self, theta: &[f64; 3], r0: &[f64]) -> DMatrix<f64> {
        let n = self.t.len();
        let mut j = DMatrix::zeros(n, self.free());
        for k in 0..self.free() {
            let step = 1e-7 * theta[k].abs().max(1.0);
            let mut th = *theta;
            th[k] += step;
            let r1 = self.residuals(&th);
            for i in 0..n {
                j[(i, k)] = (r1[i] - r0[i]) / step;
            }
        }
        j
    }
}

struct Run {
    theta: [f64; 3],
    cost: f64,
    converged: bool,
    iterations: usize,
    start_h: f64,
}

fn levenberg_marquardt(prob: &Problem, start: [f64; 3], start_h: f64, max_iter: usize) -> Run {
    let mut theta = start;
    let mut r = prob.residuals(&theta);
    let mut cost = Problem::cost(&r);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut it = 0;
    let floor = 1e-30 * prob.t.len() as f64;
    while it < max_iter {
        it += 1;
        if !cost.is_finite() {
            break;
        }
        if cost <= floor {
            converged = true;
            break;
        }
        let j = prob.jacobian(&theta, &r);
        let jt = j.transpose();
        let jtj = &jt * &j;
        let g = &jt * DVector::from_vec(r.clone());
        if g.amax() <= 1e-15 * (1.0 + cost) {
            converged = true;
            break;
        }
        let mut accepted = false;
        let dim = prob.free();
        while lambda < 1e16 {
            let mut a = jtj.clone();
            for d in 0..dim {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
            }
            let Some(delta) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = theta;
            for d in 0..dim {
                trial[d] += delta[d];
            }
            let rt = prob.residuals(&trial);
            let ct = Problem::cost(&rt);
            if ct.is_finite() && ct < cost {
                let small_step = delta
                    .iter()
                    .zip(theta.iter())
                    .all(|(d, t)| d.abs() <= 1e-10 * (1.0 + t.abs()));
                let small_gain = (cost - ct) <= 1e-14 * cost;
                theta = trial;
                r = rt;
                cost = ct;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if small_step || small_gain {
                    converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if converged {
            break;
        }
        if !accepted {
            // No descent direction at any damping: a stationary point.
            converged = g.amax() <= 1e-8 * (1.0 + cost);
            break;
        }
    }
    Run {
        theta,
        cost,
        converged,
        iterations: it,
        start_h,
    }
}

fn initial_tau(t: &[f64], y: &[f64]) -> f64 {
    for (ti, yi) in t.iter().zip(y) {
        if *yi < (-1f64).exp() {
            return *ti;
        }
    }
    2.0 * t[t.len() - 1]
}

/// Fits `(h, zeta/(m psi), beta^2 k_B T/(m psi))` to an empirical lifetime
/// autocovariance curve (lag 0 first).
pub fn fit_overdamped_model(curve: &CovarianceCurve, opts: &FitOptions) -> Result<FitResult> {
    if curve.len() < 10 {
        return Err(input("the fit needs at least 10 lags"));
    }
    if curve.lags[0] != 0.0 {
        return Err(input("the curve must start at lag 0"));
    }
    let c0 = curve.values[0];
    if !(c0 > 0.0) || !c0.is_finite() {
        return Err(Error::IllPosed("zero-lag value must be positive".into()));
    }
    let (lo, hi) = opts.lag_range.unwrap_or((0.0, f64::INFINITY));
    let (t, y): (Vec<f64>, Vec<f64>) = curve
        .lags
        .iter()
        .zip(&curve.values)
        .skip(1)
        .filter(|(t, _)| **t >= lo && **t <= hi)
        .map(|(t, v)| (*t, v / c0))
        .unzip();
    if t.len() < 4 {
        return Err(input("fewer than 4 lags fall inside the fitting range"));
    }
    let spread = y.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    if spread < 1e-9 {
        return Err(Error::IllPosed(
            "the curve does not decay; parameters are not identifiable".into(),
        ));
    }
    let tau0 = initial_tau(&t, &y);
    if let Some(a) = opts.amplitude {
        if !(a > 0.0 && a.is_finite()) {
            return Err(input(format!("fixed amplitude must be positive, got {a}")));
        }
    }
    let prob = Problem {
        t,
        y,
        fixed_amp: opts.amplitude,
    };
    let amp_starts = match opts.amplitude {
        Some(a) => vec![a],
        None => opts.amp_starts.clone(),
    };
    let mut starts = Vec::new();
    for &h in &opts.h_starts {
        for &a in &amp_starts {
            let ratio = tau0.powf(2.0 - 2.0 * h) / gamma(2.0 * h + 1.0);
            starts.push((h, pack(h, ratio, a)));
        }
    }
    let runs: Vec<Run> = starts
        .par_iter()
        .map(|(h, s)| levenberg_marquardt(&prob, *s, *h, opts.max_iter))
        .collect();
    let best = runs
        .iter()
        .filter(|r| r.cost.is_finite())
        .min_by(|a, b| {
            let tie = 1e-12 * a.cost.max(b.cost) + 1e-300;
            if (a.cost - b.cost).abs() <= tie {
                prob.unpack(&a.theta).0.total_cmp(&prob.unpack(&b.theta).0)
            } else {
                a.cost.total_cmp(&b.cost)
            }
        })
        .ok_or_else(|| Error::IllPosed("every start diverged".into()))?;
    let (h, ratio, amp) = prob.unpack(&best.theta);
    let r = prob.residuals(&best.theta);
    let j = prob.jacobian(&best.theta, &r);
    let jtj = j.transpose() * &j;
    let dim = prob.free();
    let dof = (prob.t.len() as f64 - dim as f64).max(1.0);
    let s2 = best.cost / dof;
    let sig = sigmoid(best.theta[0]);
    let d = Matrix3::from_diagonal(&nalgebra::Vector3::new(0.5 * sig * (1.0 - sig), ratio, amp));
    // A held amplitude gets zero variance.
    let cov = match jtj.clone().try_inverse() {
        Some(inv) => {
            let mut full = Matrix3::zeros();
            for i in 0..dim {
                for k in 0..dim {
                    full[(i, k)] = inv[(i, k)];
                }
            }
            d * full * d * s2
        }
        None => Matrix3::from_element(f64::NAN),
    };
    let mut covariance = [[0.0; 3]; 3];
    for (i, row) in covariance.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = cov[(i, k)];
        }
    }
    Ok(FitResult {
        h_hat: h,
        ratio_hat: ratio,
        tau_hat: tau_from_ratio(h, ratio),
        amp_hat: amp,
        scale_hat: c0 / (amp.exp() * amp.exp_m1()),
        residual_norm: best.cost.sqrt(),
        converged: best.converged,
        iterations: best.iterations,
        covariance,
        start_h: best.start_h,
    })
}

/// `A = log(1 + Var[lambda] / E[lambda]^2)`, the lognormal moment identity,
/// from the sample moments of a lifetime trace.
pub fn amplitude_from_moments(trace: &Trace) -> Result<f64> {
    let mean = trace.mean();
    if !(mean > 0.0) {
        return Err(input("a lifetime trace must have a positive mean"));
    }
    let ratio = trace.variance() / (mean * mean);
    if !(ratio > 0.0) {
        return Err(Error::IllPosed("the trace has no spread".into()));
    }
    Ok(ratio.ln_1p())
}

/// Model lifetime autocovariance `scale e^A (e^{A rho_E} - 1)` on `lags`,
/// for plotting fitted curves against data.
pub fn fitted_curve(fit: &FitResult, lags: &[f64]) -> Vec<f64> {
    let full = fit.scale_hat * fit.amp_hat.exp() * fit.amp_hat.exp_m1();
    lags.iter()
        .map(|t| full * normalized_lifetime_model(fit.h_hat, fit.ratio_hat, fit.amp_hat, *t))
        .collect()
}
