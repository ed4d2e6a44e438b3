//! A finite harmonic heat bath coupled bilinearly to the particle.
//!
//! The Hamiltonian is
//! `p^2/2m + m psi x^2/2 + sum_j [p_j^2/2m_b + m_b w_j^2 (q_j - g_j x / w_j^2)^2 / 2]`.
//! Eliminating the bath gives a generalized Langevin equation with kernel
//! `J(t) = m_b sum_j (g_j/w_j)^2 cos(w_j t)` and noise `G(t)` whose
//! covariance is `k_B T J(t - s)` under thermal bath initial conditions.
//!
//! Frequencies sit on a deterministic logarithmic grid. Each oscillator
//! carries the exact integral of `w^(1-2h)` over its cell (the lowest cell
//! reaching down to zero), tapered by `cos^2` over the top 90% of the band
//! in linear frequency so that the cut-off does not ring. The overall
//! constant makes `J` equal `zeta K` at the geometric mean of the band's
//! inverse edges.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{domain, input, Error, Result};
use crate::fgn::kernel_k;
use crate::params::Hurst;
use crate::rng::substream;
use crate::trace::Trace;

/// Fraction of `w_max` where the coupling taper begins.
pub const TAPER_START: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct HeatBathConfig {
    pub h: Hurst,
    pub n_osc: usize,
    pub m_b: f64,
    pub omegas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub kbt: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    /// Target friction `zeta` for the calibration `J(t0) = zeta K(t0)`.
    pub zeta: f64,
    /// Constant `c` in `(g_j / w_j)^2 = c * cell_j * taper_j / m_b`.
    pub zeta_calibration: f64,
}

/// Phase-space point of particle plus bath.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemState {
    pub x: f64,
    pub p: f64,
    pub q: Vec<f64>,
    pub p_b: Vec<f64>,
    pub t: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(domain(format!("{name} must be positive, got {v}")))
    }
}

fn taper(w: f64, w_max: f64) -> f64 {
    let start = TAPER_START * w_max;
    if w <= start {
        1.0
    } else if w >= w_max {
        0.0
    } else {
        let c = (0.5 * PI * (w - start) / (w_max - start)).cos();
        c * c
    }
}

/// Builds the bath for Hurst exponent `h` with `n` oscillators on
/// `[omega_min, omega_max]`, calibrated to friction `zeta`.
pub fn build_bath(
    h: Hurst,
    n: usize,
    omega_min: f64,
    omega_max: f64,
    m_b: f64,
    kbt: f64,
    zeta: f64,
) -> Result<HeatBathConfig> {
    let hv = h.require_subdiffusive()?.value();
    if n == 0 {
        return Err(domain("the bath needs at least one oscillator"));
    }
    positive("omega_min", omega_min)?;
    positive("omega_max", omega_max)?;
    if omega_min >= omega_max && n > 1 {
        return Err(domain("omega_min must be below omega_max"));
    }
    positive("bath mass", m_b)?;
    positive("thermal energy", kbt)?;
    positive("friction", zeta)?;

    let omegas: Vec<f64> = if n == 1 {
        vec![omega_min]
    } else {
        crate::trace::log_grid(omega_min, omega_max, n)
    };
    let a = 2.0 - 2.0 * hv;
    let cells: Vec<f64> = if n == 1 {
        vec![omegas[0].powf(a) / a]
    } else {
        let step = (omega_max / omega_min).ln() / (n - 1) as f64;
        let edge = |j: usize| -> f64 {
            if j == 0 {
                0.0
            } else if j == n {
                omega_max * (0.5 * step).exp()
            } else {
                (omegas[j - 1] * omegas[j]).sqrt()
            }
        };
        (0..n)
            .map(|j| (edge(j + 1).powf(a) - edge(j).powf(a)) / a)
            .collect()
    };
    let weights: Vec<f64> = if n == 1 {
        cells.clone()
    } else {
        cells
            .iter()
            .zip(&omegas)
            .map(|(c, w)| c * taper(*w, omega_max))
            .collect()
    };
    let t0 = 1.0 / (omega_min * omega_max).sqrt();
    let raw: f64 = weights
        .iter()
        .zip(&omegas)
        .map(|(wt, w)| wt * (w * t0).cos())
        .sum();
    let target = zeta * kernel_k(h, t0)?;
    if !(raw.abs() > 0.0) {
        return Err(domain("bath kernel vanishes at the calibration lag"));
    }
    let c = target / raw;
    if c < 0.0 {
        return Err(domain(
            "calibration requires a negative coupling constant; widen the band",
        ));
    }
    let gammas = weights
        .iter()
        .zip(&omegas)
        .map(|(wt, w)| w * (c * wt / m_b).sqrt())
        .collect();
    Ok(HeatBathConfig {
        h,
        n_osc: n,
        m_b,
        omegas,
        gammas,
        kbt,
        omega_min,
        omega_max,
        zeta,
        zeta_calibration: c,
    })
}

impl HeatBathConfig {
    /// A bath with no oscillators; the particle then moves in its potential alone.
    pub fn empty(h: Hurst, m_b: f64, kbt: f64) -> Self {
        HeatBathConfig {
            h,
            n_osc: 0,
            m_b,
            omegas: Vec::new(),
            gammas: Vec::new(),
            kbt,
            omega_min: 0.0,
            omega_max: 0.0,
            zeta: 0.0,
            zeta_calibration: 0.0,
        }
    }

    /// Reference lag where `J` is pinned to `zeta K`.
    pub fn reference_lag(&self) -> f64 {
        1.0 / (self.omega_min * self.omega_max).sqrt()
    }

    /// `(g_j / w_j)^2`, the spring constant per unit bath mass.
    fn strength(&self, j: usize) -> f64 {
        let r = self.gammas[j] / self.omegas[j];
        r * r
    }

    /// Lag beyond which the discrete sum stops tracking the power law:
    /// `2 pi / (w_max (e^d - 1))` for logarithmic spacing `d`, that is one
    /// period of the beat between neighbouring top-band oscillators.
    pub fn recurrence_time(&self) -> f64 {
        if self.n_osc < 2 {
            return f64::INFINITY;
        }
        let step = (self.omega_max / self.omega_min).ln() / (self.n_osc - 1) as f64;
        2.0 * PI / (self.omega_max * step.exp_m1())
    }

    /// Lag window `[1/w_max, recurrence/2]` where `J` is expected to follow
    /// the power law.
    pub fn valid_window(&self) -> (f64, f64) {
        (1.0 / self.omega_max, 0.5 * self.recurrence_time())
    }
}

/// `J(t) = m_b sum_j (g_j / w_j)^2 cos(w_j t)`.
pub fn bath_kernel(cfg: &HeatBathConfig, t: f64) -> f64 {
    (0..cfg.n_osc)
        .map(|j| cfg.strength(j) * (cfg.omegas[j] * t).cos())
        .sum::<f64>()
        * cfg.m_b
}

/// Thermal bath conditioned on the particle at `x0` with zero momentum.
pub fn sample_initial_conditions(cfg: &HeatBathConfig, x0: f64, seed: u64) -> SystemState {
    sample_member(cfg, x0, seed, 0)
}

/// Member `index` of an ensemble of initial conditions.
pub fn sample_member(cfg: &HeatBathConfig, x0: f64, seed: u64, index: u64) -> SystemState {
    let mut rng = substream(seed, index);
    let sp = (cfg.m_b * cfg.kbt).sqrt();
    let mut q = Vec::with_capacity(cfg.n_osc);
    let mut p_b = Vec::with_capacity(cfg.n_osc);
    for j in 0..cfg.n_osc {
        let w = cfg.omegas[j];
        let z: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        q.push(cfg.gammas[j] * x0 / (w * w) + z * (cfg.kbt / cfg.m_b).sqrt() / w);
        p_b.push(sp * y);
    }
    SystemState {
        x: x0,
        p: 0.0,
        q,
        p_b,
        t: 0.0,
    }
}

/// Particle parameters for the bath dynamics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Particle {
    pub m: f64,
    pub psi: f64,
}

fn check_state(cfg: &HeatBathConfig, s: &SystemState) -> Result<()> {
    if s.q.len() != cfg.n_osc || s.p_b.len() != cfg.n_osc {
        return Err(input(format!(
            "state has {} positions and {} momenta for {} oscillators",
            s.q.len(),
            s.p_b.len(),
            cfg.n_osc
        )));
    }
    Ok(())
}

/// Total energy of particle plus bath.
pub fn energy(cfg: &HeatBathConfig, particle: Particle, s: &SystemState) -> f64 {
    let mut e = s.p * s.p / (2.0 * particle.m) + 0.5 * particle.m * particle.psi * s.x * s.x;
    for j in 0..cfg.n_osc {
        let w = cfg.omegas[j];
        let d = s.q[j] - cfg.gammas[j] * s.x / (w * w);
        e += s.p_b[j] * s.p_b[j] / (2.0 * cfg.m_b) + 0.5 * cfg.m_b * w * w * d * d;
    }
    e
}

/// Output of [`integrate`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Particle position every `stride` steps, starting at `t = 0`.
    pub x: Trace,
    /// Largest `|E(t) - E(0)| / |E(0)|` seen at the output times.
    pub max_energy_drift: f64,
    pub final_state: SystemState,
}

/// Velocity-Verlet integration of the full system up to `t_max` with step
/// `step <= 0.1 / omega_max`, recording `x` every `stride` steps.
pub fn integrate(
    cfg: &HeatBathConfig,
    state0: &SystemState,
    particle: Particle,
    t_max: f64,
    step: f64,
    stride: usize,
) -> Result<Trajectory> {
    check_state(cfg, state0)?;
    positive("particle mass", particle.m)?;
    if !(particle.psi >= 0.0 && particle.psi.is_finite()) {
        return Err(domain("potential strength must be non-negative"));
    }
    let w_top = cfg.omegas.iter().copied().fold(0.0, f64::max);
    let limit = if w_top > 0.0 {
        0.1 / w_top
    } else {
        f64::INFINITY
    };
    if !(step > 0.0) || step > limit * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { step, limit });
    }
    if stride == 0 {
        return Err(input("output stride must be at least 1"));
    }
    let steps = (t_max / step).round() as usize;
    let n = cfg.n_osc;
    let mb = cfg.m_b;
    // Per-oscillator constants.
    let k_q: Vec<f64> = cfg.omegas.iter().map(|w| mb * w * w).collect();
    let k_x: Vec<f64> = cfg.gammas.iter().map(|g| mb * g).collect();
    let k_self: f64 = (0..n).map(|j| mb * cfg.strength(j)).sum();

    let mut s = state0.clone();
    let particle_force = |x: f64, q: &[f64]| -> f64 {
        let coupling: f64 = q.iter().zip(&k_x).map(|(qj, kx)| kx * qj).sum();
        -particle.m * particle.psi * x + coupling - k_self * x
    };
    let e0 = energy(cfg, particle, &s);
    let mut drift: f64 = 0.0;
    let mut out = Vec::with_capacity(steps / stride + 1);
    out.push(s.x);
    let mut fx = particle_force(s.x, &s.q);
    let half = 0.5 * step;
    for i in 1..=steps {
        s.p += half * fx;
        for j in 0..n {
            s.p_b[j] += half * (k_x[j] * s.x - k_q[j] * s.q[j]);
        }
        s.x += step * s.p / particle.m;
        for j in 0..n {
            s.q[j] += step * s.p_b[j] / mb;
        }
        fx = particle_force(s.x, &s.q);
        s.p += half * fx;
        for j in 0..n {
            s.p_b[j] += half * (k_x[j] * s.x - k_q[j] * s.q[j]);
        }
        if i % stride == 0 {
            out.push(s.x);
            let e = energy(cfg, particle, &s);
            drift = drift.max(((e - e0) / e0).abs());
        }
    }
    s.t = state0.t + steps as f64 * step;
    let trace = Trace::new(step * stride as f64, out)?
        .with_meta("h", cfg.h.value())
        .with_meta("n_osc", cfg.n_osc)
        .with_meta("omega_min", cfg.omega_min)
        .with_meta("omega_max", cfg.omega_max)
        .with_meta("m_b", cfg.m_b)
        .with_meta("kbt", cfg.kbt)
        .with_meta("zeta", cfg.zeta)
        .with_meta("step", step);
    Ok(Trajectory {
        x: trace,
        max_energy_drift: drift,
        final_state: s,
    })
}

/// Noise `G(t)` implied by the initial condition `s`.
pub fn noise(cfg: &HeatBathConfig, s: &SystemState, t: f64) -> f64 {
    (0..cfg.n_osc)
        .map(|j| {
            let w = cfg.omegas[j];
            let g = cfg.gammas[j];
            cfg.m_b * g * (s.q[j] - g * s.x / (w * w)) * (w * t).cos()
                + g / w * s.p_b[j] * (w * t).sin()
        })
        .sum()
}

/// One row of the fluctuation-dissipation report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdRow {
    pub lag: f64,
    /// Empirical `Cov[G(s + lag), G(s)]` at `s = 0`.
    pub empirical: f64,
    /// The same at a second origin `s = s1`, for stationarity.
    pub empirical_shifted: f64,
    pub theoretical: f64,
    /// `|empirical - theoretical| / (k_B T J(0))`.
    pub relerr: f64,
    /// Larger of the two deviations in standard errors.
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FdReport {
    pub rows: Vec<FdRow>,
    pub max_relerr: f64,
    pub max_z: f64,
    /// Largest `|mean G(t)|` in standard errors over the probed times.
    pub max_mean_z: f64,
    pub members: usize,
    pub valid_window: (f64, f64),
}

/// Compares the empirical covariance of `G` over `states` with
/// `k_B T J(t - s)` on the lag grid, at origins `0` and `shift`.
pub fn verify_fluctuation_dissipation(
    cfg: &HeatBathConfig,
    states: &[SystemState],
    lags: &[f64],
    shift: f64,
) -> Result<FdReport> {
    if states.len() < 100 {
        return Err(input(
            "the fluctuation-dissipation check needs at least 100 members",
        ));
    }
    for s in states {
        check_state(cfg, s)?;
    }
    let count = states.len() as f64;
    let var0 = cfg.kbt * bath_kernel(cfg, 0.0);
    // Values of G at times 0, shift, lag_k, shift + lag_k for every member.
    let samples: Vec<Vec<f64>> = states
        .par_iter()
        .map(|s| {
            let mut v = vec![noise(cfg, s, 0.0), noise(cfg, s, shift)];
            for &l in lags {
                v.push(noise(cfg, s, l));
                v.push(noise(cfg, s, shift + l));
            }
            v
        })
        .collect();
    let mean_of = |i: usize| samples.iter().map(|v| v[i]).sum::<f64>() / count;
    let means: Vec<f64> = (0..samples[0].len()).map(mean_of).collect();
    let mut max_mean_z: f64 = 0.0;
    for (i, m) in means.iter().enumerate() {
        let sd = (samples.iter().map(|v| (v[i] - m).powi(2)).sum::<f64>() / count).sqrt();
        if sd > 0.0 {
            max_mean_z = max_mean_z.max(m.abs() / (sd / count.sqrt()));
        }
    }
    let cov = |a: usize, b: usize| samples.iter().map(|v| v[a] * v[b]).sum::<f64>() / count;
    let mut rows = Vec::with_capacity(lags.len());
    for (k, &l) in lags.iter().enumerate() {
        let theo = cfg.kbt * bath_kernel(cfg, l);
        let e0 = cov(0, 2 + 2 * k);
        let e1 = cov(1, 3 + 2 * k);
        // Gaussian product variance: Var[G_a G_b] = s_a^2 s_b^2 + c_ab^2.
        let se = ((var0 * var0 + theo * theo) / count).sqrt();
        let z = ((e0 - theo).abs() / se).max((e1 - theo).abs() / se);
        rows.push(FdRow {
            lag: l,
            empirical: e0,
            empirical_shifted: e1,
            theoretical: theo,
            relerr: (e0 - theo).abs().max((e1 - theo).abs()) / var0,
            z,
        });
    }
    Ok(FdReport {
        max_relerr: rows.iter().map(|r| r.relerr).fold(0.0, f64::max),
        max_z: rows.iter().map(|r| r.z).fold(0.0, f64::max),
        max_mean_z,
        rows,
        members: states.len(),
        valid_window: cfg.valid_window(),
    })
}

/// Integrates `members` independent thermal starts (all at `x0`, `p = 0`)
/// in parallel and returns their trajectories.
#[allow(clippy::too_many_arguments)]
pub fn simulate_ensemble(
    cfg: &HeatBathConfig,
    particle: Particle,
    x0: f64,
    members: usize,
    seed: u64,
    t_max: f64,
    step: f64,
    stride: usize,
) -> Result<Vec<Trajectory>> {
    (0..members as u64)
        .into_par_iter()
        .map(|i| {
            let s = sample_member(cfg, x0, seed, i);
            integrate(cfg, &s, particle, t_max, step, stride)
        })
        .collect()
}
