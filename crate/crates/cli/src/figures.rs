//! Synthetic-data recipes for the standard plots. Every recipe simulates an
//! overdamped trace with `zeta/(m psi) = 0.40`, `m = psi = k_B T = 1`, and
//! writes one CSV with theory next to the empirical estimate.

use subdiff::analytic::{overdamped_autocovariance, overdamped_laplace, tau};
use subdiff::inference::fit::fitted_curve;
use subdiff::inference::laplace::{laplace_transform_curve, recover_kernel, resolvable_band};
use subdiff::inference::potential::freedman_diaconis_bins;
use subdiff::inference::{
    amplitude_from_moments, empirical_autocorrelation, fit_overdamped_model, fit_power_law,
    reconstruct_potential, FitOptions,
};
use subdiff::io::{Precision, Table};
use subdiff::lifetime::{
    empirical_multi_time, four_step_corr, lifetime_map, three_step_corr, LifetimeParams,
};
use subdiff::sim::{simulate_overdamped, Regime, SimRequest};
use subdiff::specfun::kernel_laplace;
use subdiff::trace::log_grid;
use subdiff::{Hurst, PhysicalParams, Trace};

use crate::{hurst, Failure, FigureArgs, FigureName};

const BETA: f64 = 0.9;

struct Setup {
    p: PhysicalParams,
    h: Hurst,
    tau: f64,
    x: Trace,
}

fn setup(a: &FigureArgs, samples_per_tau: f64) -> Result<Setup, Failure> {
    let h = hurst(a.h)?;
    if a.n < 1000 {
        return Err(Failure::Usage("--n must be at least 1000".into()));
    }
    let p = PhysicalParams::harmonic(1.0, 0.4, 1.0, 1.0)?;
    let tau = tau(&p, h)?;
    let req = SimRequest {
        params: p,
        h,
        regime: Regime::Overdamped,
        n: a.n,
        dt: tau / samples_per_tau,
        seed: a.seed,
    };
    let x = simulate_overdamped(&req)?;
    Ok(Setup { p, h, tau, x })
}

pub fn run(a: FigureArgs) -> Result<(), Failure> {
    let table = match a.name {
        FigureName::Fig2 => autocorrelation_fit(&a)?,
        FigureName::Fig3 => time_symmetry(&a)?,
        FigureName::Fig4 => four_point(&a)?,
        FigureName::Fig6b => potential(&a)?,
        FigureName::Fig7a => laplace(&a)?,
        FigureName::Fig7b => kernel(&a)?,
    };
    table
        .meta("h", a.h)
        .meta("seed", a.seed)
        .write(&a.out, Precision::Summary)?;
    Ok(())
}

fn lifetime(s: &Setup) -> Result<(LifetimeParams, Trace), Failure> {
    let lp = LifetimeParams::new(1.0, BETA, 0.0)?;
    let lam = lifetime_map(&s.x, &lp);
    Ok((lp, lam))
}

fn autocorrelation_fit(a: &FigureArgs) -> Result<Table, Failure> {
    let s = setup(a, 10.0)?;
    let (_, lam) = lifetime(&s)?;
    let emp = empirical_autocorrelation(&lam, 200.min(a.n / 10))?;
    let opts = FitOptions {
        lag_range: Some((0.0, 5.0 * s.tau)),
        amplitude: Some(amplitude_from_moments(&lam)?),
        ..FitOptions::default()
    };
    let f = fit_overdamped_model(&emp, &opts)?;
    let model = fitted_curve(&f, &emp.lags);
    let mut t = Table::new(&["lag", "empirical", "fitted"])
        .meta("h_hat", f.h_hat)
        .meta("ratio_hat", f.ratio_hat)
        .meta("amp_hat", f.amp_hat);
    for ((l, e), m) in emp.lags.iter().zip(&emp.values).zip(&model) {
        t.push(vec![*l, *e, *m]);
    }
    Ok(t)
}

fn time_symmetry(a: &FigureArgs) -> Result<Table, Failure> {
    let s = setup(a, 10.0)?;
    let (lp, lam) = lifetime(&s)?;
    let cov = |t: f64| overdamped_autocovariance(&s.p, s.h, t).unwrap_or(0.0);
    let dt = lam.dt();
    let mut t = Table::new(&[
        "t",
        "theory_t_2t",
        "theory_2t_t",
        "empirical_t_2t",
        "empirical_2t_t",
    ]);
    for k in (1..=40).filter(|k| 3 * k < a.n) {
        let tk = k as f64 * dt;
        t.push(vec![
            tk,
            three_step_corr(&lp, cov, tk, 2.0 * tk),
            three_step_corr(&lp, cov, 2.0 * tk, tk),
            empirical_multi_time(&lam, &[0, k, 3 * k])?,
            empirical_multi_time(&lam, &[0, 2 * k, 3 * k])?,
        ]);
    }
    Ok(t)
}

fn four_point(a: &FigureArgs) -> Result<Table, Failure> {
    let s = setup(a, 10.0)?;
    let (lp, lam) = lifetime(&s)?;
    let cov = |t: f64| overdamped_autocovariance(&s.p, s.h, t).unwrap_or(0.0);
    let dt = lam.dt();
    let mut t = Table::new(&["t", "theory", "empirical"]);
    for k in (1..=40).filter(|k| 3 * k < a.n) {
        let tk = k as f64 * dt;
        t.push(vec![
            tk,
            four_step_corr(&lp, cov, tk, tk, tk),
            empirical_multi_time(&lam, &[0, k, 2 * k, 3 * k])?,
        ]);
    }
    Ok(t)
}

fn potential(a: &FigureArgs) -> Result<Table, Failure> {
    let s = setup(a, 10.0)?;
    let pot = reconstruct_potential(&s.x, freedman_diaconis_bins(&s.x), s.p.kbt)?;
    let (qa, qb, qc) = pot.fit_quadratic()?;
    let stiffness = s.p.m * s.p.psi.unwrap_or(0.0);
    let mut t = Table::new(&["x", "u", "quadratic", "exact"])
        .meta("curvature", 2.0 * qa)
        .meta("m_psi", stiffness);
    for (x, u) in pot.x.iter().zip(&pot.u) {
        t.push(vec![
            *x,
            *u,
            qa * x * x + qb * x + qc,
            0.5 * stiffness * x * x,
        ]);
    }
    Ok(t)
}

fn transform_grid(
    s: &Setup,
    a: &FigureArgs,
) -> Result<(subdiff::CovarianceCurve, Vec<f64>), Failure> {
    let curve = empirical_autocorrelation(&s.x, 20_000.min(a.n / 5))?;
    let (lo, hi) = resolvable_band(&curve)?;
    let grid: Vec<f64> = log_grid(0.1 / s.tau, 1.0 / s.tau, 21)
        .into_iter()
        .filter(|v| *v >= lo && *v <= hi)
        .collect();
    if grid.len() < 3 {
        return Err(Failure::Usage(
            "trace too short to resolve the decade below 1/tau; raise --n".into(),
        ));
    }
    Ok((curve, grid))
}

fn laplace(a: &FigureArgs) -> Result<Table, Failure> {
    let s = setup(a, 20.0)?;
    let curve = empirical_autocorrelation(&s.x, 20_000.min(a.n / 5))?;
    let (lo, hi) = resolvable_band(&curve)?;
    let grid = log_grid(lo, hi, 41);
    let c = laplace_transform_curve(&curve, &grid)?;
    let mut t = Table::new(&["s", "empirical", "exact"]).meta("tau", s.tau);
    for (sv, v) in c.s().iter().zip(c.values()) {
        t.push(vec![*sv, *v, overdamped_laplace(&s.p, s.h, *sv)?]);
    }
    Ok(t)
}

fn kernel(a: &FigureArgs) -> Result<Table, Failure> {
    let s = setup(a, 20.0)?;
    let (curve, grid) = transform_grid(&s, a)?;
    let k = recover_kernel(&laplace_transform_curve(&curve, &grid)?, &s.p)?;
    let (sv, kv) = (k.s(), k.values());
    let fit = fit_power_law(sv, kv)?;
    let n = sv.len();
    let mut t = Table::new(&["s", "kernel", "exact", "slope"])
        .meta("fitted_slope", fit.slope)
        .meta("expected_slope", 1.0 - 2.0 * a.h)
        .meta("tau", s.tau);
    for i in 0..n {
        let (l, r) = (i.saturating_sub(1), (i + 1).min(n - 1));
        let local = (kv[r].ln() - kv[l].ln()) / (sv[r].ln() - sv[l].ln());
        t.push(vec![sv[i], kv[i], kernel_laplace(s.h, sv[i])?, local]);
    }
    Ok(t)
}
