//! Exact path simulation of the three regimes.
//!
//! Every solution is a zero-mean stationary Gaussian process with known
//! covariance, so paths are drawn directly from that law on the sampling
//! grid. There is no time stepping and hence no discretization bias.

use rayon::prelude::*;

use crate::analytic::{harmonic_covariances, overdamped_autocovariance, velocity_autocovariance};
use crate::error::{domain, input, Error, Result};
use crate::params::{Hurst, PhysicalParams};
use crate::rng::{substream, GENERATOR_ID};
use crate::synthesis::{PairSampler, StationarySampler};
use crate::trace::{CovarianceCurve, CurveKind, Trace};

/// Dense joint factorization is used for the harmonic pair only up to this
/// many time points (the matrix has twice as many rows).
pub const HARMONIC_DENSE_LIMIT: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Free,
    Harmonic,
    Overdamped,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Free => "free",
            Regime::Harmonic => "harmonic",
            Regime::Overdamped => "overdamped",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(Regime::Free),
            "harmonic" => Ok(Regime::Harmonic),
            "overdamped" => Ok(Regime::Overdamped),
            _ => Err(input(format!("unknown regime {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimRequest {
    pub params: PhysicalParams,
    pub h: Hurst,
    pub regime: Regime,
    pub n: usize,
    pub dt: f64,
    pub seed: u64,
}

impl SimRequest {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.h.require_subdiffusive()?;
        match (self.regime, self.params.psi) {
            (Regime::Free, Some(_)) => {
                return Err(domain("the free regime takes no potential strength"))
            }
            (Regime::Harmonic | Regime::Overdamped, None) => {
                return Err(domain(
                    "harmonic and overdamped regimes need a potential strength psi",
                ))
            }
            _ => {}
        }
        if self.n < 2 {
            return Err(input("a simulated trace needs at least 2 samples"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(input(format!("step must be positive, got {}", self.dt)));
        }
        Ok(())
    }

    fn expect(&self, regime: Regime) -> Result<()> {
        if self.regime != regime {
            return Err(input(format!(
                "request is for the {} regime, not {}",
                self.regime.name(),
                regime.name()
            )));
        }
        self.validate()
    }

    fn stamp(&self, trace: Trace, index: u64, quantity: &str) -> Trace {
        let mut t = trace
            .with_meta("seed", self.seed)
            .with_meta("path", index)
            .with_meta("generator", GENERATOR_ID)
            .with_meta("h", self.h.value())
            .with_meta("regime", self.regime.name())
            .with_meta("quantity", quantity)
            .with_meta("m", self.params.m)
            .with_meta("zeta", self.params.zeta)
            .with_meta("kbt", self.params.kbt);
        if let Some(psi) = self.params.psi {
            t = t.with_meta("psi", psi);
        }
        t
    }
}

fn infeasible(e: Error, req: &SimRequest) -> Error {
    match e {
        Error::InfeasibleGrid(msg) => Error::InfeasibleGrid(format!(
            "{msg} (n = {}, dt = {}, span n*dt = {})",
            req.n,
            req.dt,
            req.n as f64 * req.dt
        )),
        other => other,
    }
}

/// Pre-factored sampler for repeated draws of one request.
pub struct Simulator {
    req: SimRequest,
    kind: Kind,
}

enum Kind {
    Scalar(StationarySampler),
    Pair(PairSampler),
}

impl Simulator {
    pub fn new(req: SimRequest) -> Result<Self> {
        req.validate()?;
        let (p, h, dt) = (req.params, req.h, req.dt);
        let kind = match req.regime {
            Regime::Overdamped => Kind::Scalar(scalar(req.n, |k| {
                overdamped_autocovariance(&p, h, k as f64 * dt)
            })?),
            Regime::Free => Kind::Scalar(scalar(req.n, |k| {
                velocity_autocovariance(&p, h, k as f64 * dt)
            })?),
            Regime::Harmonic => {
                let lags = tabulate_pair(req.n, |k| {
                    harmonic_covariances(&p, h, k as f64 * dt).map(|c| c.lag_block())
                })?;
                let lag = |k: usize| {
                    if k < lags.len() {
                        lags[k]
                    } else {
                        harmonic_covariances(&p, h, k as f64 * dt)
                            .map(|c| c.lag_block())
                            .unwrap_or([f64::NAN; 4])
                    }
                };
                Kind::Pair(PairSampler::new(req.n, lag, HARMONIC_DENSE_LIMIT)?)
            }
        };
        Ok(Simulator { req, kind })
    }

    pub fn request(&self) -> &SimRequest {
        &self.req
    }

    /// Path `index` of the ensemble: the position for the overdamped
    /// regime, the velocity for the free one and `(x, v)` for the
    /// harmonic one (with `v` in the second slot).
    pub fn path(&self, index: u64) -> (Trace, Option<Trace>) {
        let mut rng = substream(self.req.seed, index);
        let dt = self.req.dt;
        match &self.kind {
            Kind::Scalar(s) => {
                let q = if self.req.regime == Regime::Free {
                    "v"
                } else {
                    "x"
                };
                let t = Trace::new(dt, s.sample(&mut rng)).expect("non-empty path");
                (self.req.stamp(t, index, q), None)
            }
            Kind::Pair(s) => {
                let (x, v) = s.sample(&mut rng);
                let x = Trace::new(dt, x).expect("non-empty path");
                let v = Trace::new(dt, v).expect("non-empty path");
                (
                    self.req.stamp(x, index, "x"),
                    Some(self.req.stamp(v, index, "v")),
                )
            }
        }
    }

    /// Paths `0..count`, generated in parallel.
    pub fn ensemble(&self, count: usize) -> Vec<(Trace, Option<Trace>)> {
        (0..count as u64)
            .into_par_iter()
            .map(|i| self.path(i))
            .collect()
    }
}

/// Tabulates `acov` for lags `0..n` in parallel, then builds the sampler,
/// computing further lags on demand if the embedding needs padding.
fn scalar<F: Fn(usize) -> Result<f64> + Sync>(n: usize, acov: F) -> Result<StationarySampler> {
    let table: Vec<f64> = (0..n).into_par_iter().map(&acov).collect::<Result<_>>()?;
    let failure = std::cell::Cell::new(None);
    let sampler = StationarySampler::new(n, |k| {
        if k < table.len() {
            table[k]
        } else {
            acov(k).unwrap_or_else(|e| {
                failure.set(Some(e.to_string()));
                f64::NAN
            })
        }
    })?;
    if let Some(msg) = failure.take() {
        return Err(Error::InfeasibleGrid(format!(
            "covariance evaluation failed while padding: {msg}"
        )));
    }
    Ok(sampler)
}

fn tabulate_pair<F: Fn(usize) -> Result<[f64; 4]> + Sync>(
    n: usize,
    lag: F,
) -> Result<Vec<[f64; 4]>> {
    (0..n).into_par_iter().map(&lag).collect()
}

/// Stationary overdamped displacement path.
pub fn simulate_overdamped(req: &SimRequest) -> Result<Trace> {
    req.expect(Regime::Overdamped)?;
    Ok(Simulator::new(*req)
        .map_err(|e| infeasible(e, req))?
        .path(0)
        .0)
}

/// Stationary free-particle velocity path.
pub fn simulate_free_velocity(req: &SimRequest) -> Result<Trace> {
    req.expect(Regime::Free)?;
    Ok(Simulator::new(*req)
        .map_err(|e| infeasible(e, req))?
        .path(0)
        .0)
}

/// Jointly stationary harmonic `(x, v)` paths.
pub fn simulate_harmonic(req: &SimRequest) -> Result<(Trace, Trace)> {
    req.expect(Regime::Harmonic)?;
    let (x, v) = Simulator::new(*req)
        .map_err(|e| infeasible(e, req))?
        .path(0);
    Ok((x, v.expect("harmonic paths come in pairs")))
}

/// Cumulative trapezoidal integral, `x(0) = 0`.
pub fn displacement_from_velocity(v: &Trace) -> Trace {
    let dt = v.dt();
    let vals = v.values();
    let mut out = Vec::with_capacity(vals.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in vals.windows(2) {
        acc += 0.5 * dt * (w[0] + w[1]);
        out.push(acc);
    }
    let mut t = Trace::with_start(dt, v.start_time(), out).expect("non-empty");
    t.meta = v.meta.clone();
    t.with_meta("quantity", "x")
}

fn check_common_grid(traces: &[Trace]) -> Result<(usize, f64)> {
    let first = traces.first().ok_or_else(|| input("empty ensemble"))?;
    let (n, dt) = (first.len(), first.dt());
    for (i, t) in traces.iter().enumerate() {
        if t.len() != n || (t.dt() - dt).abs() > 1e-12 * dt {
            return Err(Error::GridMismatch(format!(
                "trace {i} has {} samples at step {}, expected {n} at step {dt}",
                t.len(),
                t.dt()
            )));
        }
    }
    Ok((n, dt))
}

/// Pointwise ensemble mean of `x(t_k)^2` with its standard error.
pub fn ensemble_msd(traces: &[Trace]) -> Result<CovarianceCurve> {
    if traces.len() < 2 {
        return Err(input(
            "the ensemble mean squared displacement needs at least 2 traces",
        ));
    }
    let (n, dt) = check_common_grid(traces)?;
    let count = traces.len() as f64;
    let mut mean = vec![0.0; n];
    let mut sq = vec![0.0; n];
    for t in traces {
        for (k, x) in t.values().iter().enumerate() {
            let y = x * x;
            mean[k] += y;
            sq[k] += y * y;
        }
    }
    let mut se = vec![0.0; n];
    for k in 0..n {
        mean[k] /= count;
        let var = (sq[k] / count - mean[k] * mean[k]).max(0.0) * count / (count - 1.0);
        se[k] = (var / count).sqrt();
    }
    let lags = (0..n).map(|k| k as f64 * dt).collect();
    let mut c = CovarianceCurve::new(lags, mean, CurveKind::Msd)?;
    c.stderr = Some(se);
    Ok(c)
}

/// Time- and ensemble-averaged squared increment
/// `mean over paths and t0 of (x(t0 + k dt) - x(t0))^2` at the given lag
/// indices, with a standard error from the spread across paths.
///
/// For a process with stationary increments started at the origin this
/// estimates the same curve as [`ensemble_msd`] with far less variance.
pub fn time_averaged_msd(traces: &[Trace], lag_indices: &[usize]) -> Result<CovarianceCurve> {
    if traces.len() < 2 {
        return Err(input(
            "the averaged squared displacement needs at least 2 traces",
        ));
    }
    let (n, dt) = check_common_grid(traces)?;
    if lag_indices.iter().any(|&k| k == 0 || k >= n) {
        return Err(input("lag indices must lie in 1..n"));
    }
    let per_path: Vec<Vec<f64>> = traces
        .par_iter()
        .map(|t| {
            let x = t.values();
            lag_indices
                .iter()
                .map(|&k| {
                    let s: f64 = (0..n - k).map(|i| (x[i + k] - x[i]).powi(2)).sum();
                    s / (n - k) as f64
                })
                .collect()
        })
        .collect();
    let count = traces.len() as f64;
    let mut mean = vec![0.0; lag_indices.len()];
    let mut se = vec![0.0; lag_indices.len()];
    for j in 0..lag_indices.len() {
        let m = per_path.iter().map(|r| r[j]).sum::<f64>() / count;
        let v = per_path.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / (count - 1.0);
        mean[j] = m;
        se[j] = (v / count).sqrt();
    }
    let lags = lag_indices.iter().map(|&k| k as f64 * dt).collect();
    let mut c = CovarianceCurve::new(lags, mean, CurveKind::Msd)?;
    c.stderr = Some(se);
    Ok(c)
}
