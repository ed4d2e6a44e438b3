use std::fs;
use std::path::Path;

use subdiff::analytic::{self, AnalyticCurve, AnalyticSpectrum};
use subdiff::fgn::kernel_k;
use subdiff::heatbath::{self, Particle};
use subdiff::inference::fit::fitted_curve;
use subdiff::inference::laplace::{default_s_grid, laplace_transform_curve, recover_kernel};
use subdiff::inference::potential::freedman_diaconis_bins;
use subdiff::inference::{
    amplitude_from_moments, empirical_autocorrelation, estimate_hurst_msd, fit_overdamped_model,
    reconstruct_potential, FitOptions, FitResult,
};
use subdiff::io::{
    curve_from_table, curve_table, laplace_table, read_trace_csv, write_trace_csv, Precision, Table,
};
use subdiff::lifetime::{lifetime_map, LifetimeParams};
use subdiff::sim::{
    displacement_from_velocity, ensemble_msd, time_averaged_msd, Regime, SimRequest, Simulator,
};
use subdiff::trace::log_grid;
use subdiff::{CovarianceCurve, CurveKind, Trace};

use crate::{
    hurst, AnalyticArgs, CurveArg, Failure, FitArgs, HeatbathArgs, LifetimeArgs, MsdArgs,
    PotentialArgs, RecoverArgs, RegimeArg, SimulateArgs,
};

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn regime(r: RegimeArg) -> Regime {
    match r {
        RegimeArg::Free => Regime::Free,
        RegimeArg::Harmonic => Regime::Harmonic,
        RegimeArg::Overdamped => Regime::Overdamped,
    }
}

/// Validated simulator for a regime and physics block.
pub fn simulator(
    r: RegimeArg,
    h: f64,
    physics: &crate::Physics,
    n: usize,
    dt: f64,
    seed: u64,
) -> Result<Simulator, Failure> {
    let req = SimRequest {
        params: physics.params()?,
        h: hurst(h)?,
        regime: regime(r),
        n,
        dt,
        seed,
    };
    req.validate().map_err(|e| usage(e.to_string()))?;
    Ok(Simulator::new(req)?)
}

pub fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let sim = simulator(a.regime, a.h, &a.physics, a.n, a.dt, a.seed)?;
    if a.displacement && a.regime != RegimeArg::Free {
        return Err(usage("--displacement applies to the free regime only"));
    }
    let (first, second) = sim.path(a.path_index);
    match second {
        None => {
            let trace = if a.displacement {
                displacement_from_velocity(&first)
            } else {
                first
            };
            write_trace_csv(&a.out, &trace)?;
        }
        Some(v) => {
            let mut t = subdiff::io::trace_table(&first);
            t.columns = vec!["time".into(), "x".into(), "v".into()];
            t.meta.retain(|(k, _)| k != "quantity");
            for (row, vv) in t.rows.iter_mut().zip(v.values()) {
                row.push(*vv);
            }
            t.write(&a.out, Precision::Exact)?;
        }
    }
    Ok(())
}

fn grid(from: f64, to: f64, points: usize, log: bool) -> Result<Vec<f64>, Failure> {
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    if !(to > from) {
        return Err(usage("--to must exceed --from"));
    }
    if log {
        if !(from > 0.0) {
            return Err(usage("a logarithmic grid needs a positive start"));
        }
        return Ok(log_grid(from, to, points));
    }
    Ok((0..points)
        .map(|i| from + (to - from) * i as f64 / (points - 1) as f64)
        .collect())
}

pub fn analytic(a: AnalyticArgs) -> Result<(), Failure> {
    let p = a.physics.params()?;
    let h = hurst(a.h)?;
    let xs = grid(a.from, a.to, a.points, a.log)?;
    let needs_psi = matches!(
        a.curve,
        CurveArg::HarmonicXx
            | CurveArg::HarmonicVv
            | CurveArg::HarmonicVx
            | CurveArg::Overdamped
            | CurveArg::OverdampedLaplace
            | CurveArg::HarmonicSpectrum
            | CurveArg::OverdampedSpectrum
    );
    if needs_psi && p.psi.is_none() {
        return Err(usage("this curve needs --psi"));
    }
    let time_curve = |c: AnalyticCurve| -> Result<Table, Failure> {
        Ok(curve_table(&analytic::tabulate(&p, h, c, &xs)?))
    };
    let spectrum = |which: AnalyticSpectrum| -> Result<Table, Failure> {
        let s = analytic::tabulate_spectrum(&p, h, which, &xs)?;
        let mut t = Table::new(&["omega", "value"]);
        t.rows = s
            .omegas
            .iter()
            .zip(&s.values)
            .map(|(w, v)| vec![*w, *v])
            .collect();
        Ok(t)
    };
    let pointwise =
        |col: &str, f: &dyn Fn(f64) -> subdiff::Result<f64>| -> Result<Table, Failure> {
            let mut t = Table::new(&[col, "value"]);
            for &x in &xs {
                t.push(vec![x, f(x)?]);
            }
            Ok(t)
        };
    let table = match a.curve {
        CurveArg::FreeVelocity => time_curve(AnalyticCurve::FreeVelocity)?,
        CurveArg::FreeMsd => time_curve(AnalyticCurve::FreeMsd)?,
        CurveArg::MsdAsymptote => time_curve(AnalyticCurve::MsdAsymptote)?,
        CurveArg::HarmonicXx => time_curve(AnalyticCurve::HarmonicXx)?,
        CurveArg::HarmonicVv => time_curve(AnalyticCurve::HarmonicVv)?,
        CurveArg::HarmonicVx => time_curve(AnalyticCurve::HarmonicVx)?,
        CurveArg::Overdamped => time_curve(AnalyticCurve::Overdamped)?,
        CurveArg::OverdampedLaplace => pointwise("s", &|s| analytic::overdamped_laplace(&p, h, s))?,
        CurveArg::FreeVelocitySpectrum => spectrum(AnalyticSpectrum::FreeVelocity)?,
        CurveArg::HarmonicSpectrum => spectrum(AnalyticSpectrum::HarmonicDisplacement)?,
        CurveArg::OverdampedSpectrum => spectrum(AnalyticSpectrum::Overdamped)?,
        CurveArg::Kernel => pointwise("lag", &|t| kernel_k(h, t))?,
    };
    let table = table
        .meta("h", a.h)
        .meta("m", p.m)
        .meta("zeta", p.zeta)
        .meta("kbt", p.kbt);
    table.write(&a.out, Precision::Exact)?;
    Ok(())
}

pub fn msd(a: MsdArgs) -> Result<(), Failure> {
    if a.paths < 2 {
        return Err(usage("--paths must be at least 2"));
    }
    let sim = simulator(a.regime, a.h, &a.physics, a.n, a.dt, a.seed)?;
    let paths: Vec<Trace> = sim
        .ensemble(a.paths)
        .into_iter()
        .map(|(first, _)| match a.regime {
            RegimeArg::Free => displacement_from_velocity(&first),
            _ => {
                let x0 = first.values()[0];
                let shifted = first.values().iter().map(|x| x - x0).collect();
                Trace::new(first.dt(), shifted).expect("same grid")
            }
        })
        .collect();
    let curve = if a.time_averaged {
        let top = (a.n - 1) as f64;
        let mut lags: Vec<usize> = log_grid(1.0, top, 60)
            .iter()
            .map(|k| k.round() as usize)
            .collect();
        lags.dedup();
        time_averaged_msd(&paths, &lags)?
    } else {
        ensemble_msd(&paths)?
    };
    let window = a.window.as_ref().map(|w| (w[0], w[1]));
    let est = estimate_hurst_msd(&curve, window)?;
    let table = curve_table(&curve)
        .meta("slope", est.slope)
        .meta("slope_stderr", 2.0 * est.stderr)
        .meta("prefactor", est.prefactor)
        .meta("h_hat", est.h)
        .meta("paths", a.paths)
        .meta("seed", a.seed);
    table.write(&a.out, Precision::Summary)?;
    println!(
        "slope={:.6} slope_stderr={:.6} h_hat={:.6}",
        est.slope,
        2.0 * est.stderr,
        est.h
    );
    Ok(())
}

pub fn heatbath(a: HeatbathArgs) -> Result<(), Failure> {
    let h = hurst(a.h)?;
    let cfg = heatbath::build_bath(h, a.n_osc, a.omega_min, a.omega_max, a.m_b, a.kbt, a.zeta)
        .map_err(|e| usage(e.to_string()))?;
    let step = a.step.unwrap_or(0.1 / a.omega_max);
    if a.members == 0 {
        return Err(usage("--members must be at least 1"));
    }
    let particle = Particle { m: a.m, psi: a.psi };
    let runs = heatbath::simulate_ensemble(
        &cfg, particle, a.x0, a.members, a.seed, a.t_max, step, a.stride,
    )?;
    let drift = runs.iter().map(|r| r.max_energy_drift).fold(0.0, f64::max);
    let first = runs[0]
        .x
        .clone()
        .with_meta("seed", a.seed)
        .with_meta("quantity", "x");
    write_trace_csv(&a.out, &first)?;
    println!(
        "max_energy_drift={drift:.3e} recurrence_time={:.6}",
        cfg.recurrence_time()
    );
    if let Some(path) = &a.msd_out {
        let xs: Vec<Trace> = runs.into_iter().map(|r| r.x).collect();
        let c = ensemble_msd(&xs)?;
        curve_table(&c)
            .meta("members", a.members)
            .write(path, Precision::Summary)?;
    }
    if let Some(path) = &a.fd_report {
        let states: Vec<_> = (0..a.fd_members as u64)
            .map(|i| heatbath::sample_member(&cfg, a.x0, a.seed, i))
            .collect();
        let (lo, hi) = cfg.valid_window();
        let lags = log_grid(lo, hi, 20);
        let report = heatbath::verify_fluctuation_dissipation(&cfg, &states, &lags, 0.5 * hi)?;
        let mut t = Table::new(&[
            "lag",
            "empirical",
            "empirical_shifted",
            "theoretical",
            "relerr",
            "z",
        ])
        .meta("members", report.members)
        .meta("max_relerr", report.max_relerr)
        .meta("max_z", report.max_z)
        .meta("max_mean_z", report.max_mean_z)
        .meta("valid_lo", lo)
        .meta("valid_hi", hi);
        for r in &report.rows {
            t.push(vec![
                r.lag,
                r.empirical,
                r.empirical_shifted,
                r.theoretical,
                r.relerr,
                r.z,
            ]);
        }
        t.write(path, Precision::Summary)?;
        println!(
            "fd_max_z={:.3} fd_max_relerr={:.3e}",
            report.max_z, report.max_relerr
        );
    }
    if let Some(path) = &a.kernel_out {
        let mut t = Table::new(&["lag", "bath_kernel", "target"])
            .meta("reference_lag", cfg.reference_lag());
        for lag in log_grid(
            1.0 / a.omega_max,
            2.0 * cfg.recurrence_time().min(1e3 / a.omega_min),
            200,
        ) {
            t.push(vec![
                lag,
                heatbath::bath_kernel(&cfg, lag),
                a.zeta * kernel_k(h, lag)?,
            ]);
        }
        t.write(path, Precision::Summary)?;
    }
    Ok(())
}

pub fn lifetime(a: LifetimeArgs) -> Result<(), Failure> {
    let lp = LifetimeParams::new(a.k0, a.beta, a.x_eq).map_err(|e| usage(e.to_string()))?;
    let x = read_trace_csv(&a.input)?;
    let lam = lifetime_map(&x, &lp);
    write_trace_csv(&a.out, &lam)?;
    if let (Some(k), Some(path)) = (a.max_lag, &a.corr_out) {
        let c = empirical_autocorrelation(&lam, k)?;
        curve_table(&c).write(path, Precision::Summary)?;
    }
    Ok(())
}

fn curve_source(
    input: &Option<std::path::PathBuf>,
    trace: &Option<std::path::PathBuf>,
    max_lag: usize,
    kind: CurveKind,
) -> Result<(CovarianceCurve, Option<Trace>), Failure> {
    if let Some(path) = input {
        return Ok((curve_from_table(&Table::read(path)?, kind)?, None));
    }
    let path = trace
        .as_ref()
        .ok_or_else(|| usage("give --input or --trace"))?;
    let t = read_trace_csv(path)?;
    if max_lag >= t.len() {
        return Err(usage(format!(
            "--max-lag {max_lag} must be below the trace length {}",
            t.len()
        )));
    }
    Ok((empirical_autocorrelation(&t, max_lag)?, Some(t)))
}

pub fn fit_report(f: &FitResult) -> String {
    let mut s = String::new();
    let mut kv = |k: &str, v: String| {
        s.push_str(k);
        s.push('=');
        s.push_str(&v);
        s.push('\n');
    };
    kv("h_hat", format!("{:.9e}", f.h_hat));
    kv("h_stderr", format!("{:.9e}", f.covariance[0][0].sqrt()));
    kv("ratio_hat", format!("{:.9e}", f.ratio_hat));
    kv("tau_hat", format!("{:.9e}", f.tau_hat));
    kv("amp_hat", format!("{:.9e}", f.amp_hat));
    kv("scale_hat", format!("{:.9e}", f.scale_hat));
    kv("residual_norm", format!("{:.9e}", f.residual_norm));
    kv("converged", f.converged.to_string());
    kv("iterations", f.iterations.to_string());
    kv("start_h", format!("{}", f.start_h));
    s
}

pub fn fit(a: FitArgs) -> Result<(), Failure> {
    let (curve, trace) = curve_source(&a.input, &a.trace, a.max_lag, CurveKind::Lifetime)?;
    let amplitude = match (a.amplitude, a.amplitude_from_moments, &trace) {
        (Some(v), _, _) => Some(v),
        (None, true, Some(t)) => Some(amplitude_from_moments(t)?),
        _ => None,
    };
    let opts = FitOptions {
        lag_range: a.fit_until.map(|hi| (0.0, hi)),
        amplitude,
        ..FitOptions::default()
    };
    let f = fit_overdamped_model(&curve, &opts)?;
    let text = fit_report(&f);
    match &a.out {
        Some(path) => fs::write(path, &text).map_err(subdiff::Error::from)?,
        None => print!("{text}"),
    }
    if let Some(path) = &a.curve_out {
        let model = fitted_curve(&f, &curve.lags);
        let mut t = Table::new(&["lag", "empirical", "fitted"]).meta("h_hat", f.h_hat);
        for ((l, e), m) in curve.lags.iter().zip(&curve.values).zip(&model) {
            t.push(vec![*l, *e, *m]);
        }
        t.write(path, Precision::Summary)?;
    }
    Ok(())
}

pub fn recover_kernel_cmd(a: RecoverArgs) -> Result<(), Failure> {
    let p = a.physics.params()?;
    if p.psi.is_none() {
        return Err(usage("kernel recovery needs --psi"));
    }
    let (curve, _) = curve_source(&a.input, &a.trace, a.max_lag, CurveKind::Displacement)?;
    let s = default_s_grid(&curve, a.points_per_decade)?;
    let transform = laplace_transform_curve(&curve, &s)?;
    let kernel = recover_kernel(&transform, &p)?;
    write_laplace(&a.out, &kernel, "kernel")?;
    if let Some(path) = &a.transform_out {
        write_laplace(path, &transform, "covariance_transform")?;
    }
    Ok(())
}

fn write_laplace(path: &Path, c: &subdiff::LaplaceCurve, what: &str) -> Result<(), Failure> {
    laplace_table(c)
        .meta("quantity", what)
        .write(path, Precision::Summary)?;
    Ok(())
}

pub fn potential(a: PotentialArgs) -> Result<(), Failure> {
    if !(a.kbt > 0.0) {
        return Err(usage("--kbt must be positive"));
    }
    let x = read_trace_csv(&a.input)?;
    let bins = a.bins.unwrap_or_else(|| freedman_diaconis_bins(&x));
    let pot = reconstruct_potential(&x, bins, a.kbt)?;
    let (qa, qb, qc) = pot.fit_quadratic()?;
    let mut t = Table::new(&["x", "u", "count", "quadratic"])
        .meta("bins", bins)
        .meta("bin_width", pot.bin_width)
        .meta("curvature", 2.0 * qa);
    for ((x, u), c) in pot.x.iter().zip(&pot.u).zip(&pot.counts) {
        t.push(vec![*x, *u, *c as f64, qa * x * x + qb * x + qc]);
    }
    t.write(&a.out, Precision::Summary)?;
    println!("curvature={:.9e}", 2.0 * qa);
    Ok(())
}
