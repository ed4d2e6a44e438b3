use nalgebra::DMatrix;
use proptest::prelude::*;
use subdiff::analytic::overdamped_laplace;
use subdiff::fgn::sample_fgn;
use subdiff::inference::autocorr::empirical_autocorrelation_direct;
use subdiff::inference::fit::{fitted_curve, normalized_lifetime_model, tau_from_ratio};
use subdiff::inference::laplace::{covariance_from_kernel, default_s_grid};
use subdiff::inference::potential::freedman_diaconis_bins;
use subdiff::inference::{
    amplitude_from_moments, empirical_autocorrelation, ensemble_autocovariance, estimate_hurst_msd,
    fit_line, fit_overdamped_model, laplace_transform_curve, reconstruct_potential, recover_kernel,
    resolvable_band, FitOptions,
};
use subdiff::specfun::{kernel_laplace, mittag_leffler};
use subdiff::{CovarianceCurve, CurveKind, Error, Hurst, LaplaceCurve, PhysicalParams, Trace};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn tabulated(dt: f64, n: usize, f: impl Fn(f64) -> f64) -> CovarianceCurve {
    let lags: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    let values = lags.iter().map(|t| f(*t)).collect();
    CovarianceCurve::new(lags, values, CurveKind::Displacement).unwrap()
}

#[test]
fn autocorrelation_of_a_constant_is_zero() {
    let x = Trace::new(0.5, vec![2.5; 300]).unwrap();
    let c = empirical_autocorrelation(&x, 20).unwrap();
    assert_eq!(c.len(), 21);
    assert!((c.lags[3] - 1.5).abs() < 1e-15);
    assert!(c.values.iter().all(|v| v.abs() < 1e-12));
    assert!(empirical_autocorrelation(&x, 300).is_err());
}

#[test]
fn autocorrelation_matches_the_direct_sum() {
    let x = sample_fgn(Hurst::new(0.7).unwrap(), 3000, 4).unwrap();
    let c = empirical_autocorrelation(&x, 200).unwrap();
    let d = empirical_autocorrelation_direct(&x, 200).unwrap();
    assert!((c.values[0] - x.variance()).abs() < 1e-12);
    for (a, b) in c.values.iter().zip(&d) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn autocorrelation_is_positive_semidefinite() {
    let x = sample_fgn(Hurst::new(0.9).unwrap(), 400, 5).unwrap();
    let c = empirical_autocorrelation(&x, 150).unwrap();
    let m = c.len();
    let toeplitz = DMatrix::from_fn(m, m, |i, j| c.values[i.abs_diff(j)]);
    let smallest = toeplitz.symmetric_eigen().eigenvalues.min();
    assert!(smallest >= -1e-10, "smallest eigenvalue {smallest}");
}

#[test]
fn ensemble_autocovariance_checks_its_input() {
    let a = sample_fgn(Hurst::new(0.6).unwrap(), 100, 1).unwrap();
    let b = sample_fgn(Hurst::new(0.6).unwrap(), 90, 2).unwrap();
    assert!(ensemble_autocovariance(std::slice::from_ref(&a), 10).is_err());
    assert!(matches!(
        ensemble_autocovariance(&[a.clone(), b], 10),
        Err(Error::GridMismatch(_))
    ));
    let c = ensemble_autocovariance(&[a.clone(), a], 10).unwrap();
    assert_eq!(c.len(), 11);
}

#[test]
fn flat_curve_is_ill_posed() {
    let c = tabulated(0.1, 50, |_| 2.0);
    assert!(matches!(
        fit_overdamped_model(&c, &FitOptions::default()),
        Err(Error::IllPosed(_))
    ));
    let short = tabulated(0.1, 5, |t| (-t).exp());
    assert!(fit_overdamped_model(&short, &FitOptions::default()).is_err());
}

#[test]
fn noiseless_fit_recovers_parameters() {
    let (h, r, a) = (0.7, 0.5, 0.8);
    let tau = tau_from_ratio(h, r);
    let c = tabulated(tau / 20.0, 120, |t| {
        3.0 * normalized_lifetime_model(h, r, a, t)
    });
    let fit = fit_overdamped_model(&c, &FitOptions::default()).unwrap();
    assert!(fit.converged);
    assert!((fit.h_hat - h).abs() < 1e-4, "h {}", fit.h_hat);
    assert!(rel(fit.ratio_hat, r) < 1e-3, "ratio {}", fit.ratio_hat);
    assert!(rel(fit.amp_hat, a) < 1e-3, "amp {}", fit.amp_hat);
    assert!(rel(fit.tau_hat, tau) < 1e-3);
    let curve = fitted_curve(&fit, &[0.0, tau]);
    assert!(rel(curve[0], 3.0) < 1e-9);
    assert!(rel(curve[1], c.values[20]) < 1e-3);

    let held = FitOptions {
        amplitude: Some(a),
        ..FitOptions::default()
    };
    let fit = fit_overdamped_model(&c, &held).unwrap();
    assert_eq!(fit.amp_hat, a);
    assert!((fit.h_hat - h).abs() < 1e-4);
    assert_eq!(fit.covariance[2][2], 0.0);
}

#[test]
fn fit_is_scale_equivariant() {
    let c = tabulated(0.2, 80, |t| {
        normalized_lifetime_model(0.8, 1.2, 0.5, t) * (1.0 + 0.002 * (3.0 * t).sin())
    });
    let scaled = CovarianceCurve::new(
        c.lags.clone(),
        c.values.iter().map(|v| 7.0 * v).collect(),
        c.kind,
    )
    .unwrap();
    let a = fit_overdamped_model(&c, &FitOptions::default()).unwrap();
    let b = fit_overdamped_model(&scaled, &FitOptions::default()).unwrap();
    assert!((a.h_hat - b.h_hat).abs() < 1e-8);
    // The amplitude direction is shallow, so the optimizer stops earlier along it.
    assert!(rel(a.ratio_hat, b.ratio_hat) < 1e-4);
    assert!(rel(a.amp_hat, b.amp_hat) < 1e-4);
    assert!(rel(b.scale_hat, 7.0 * a.scale_hat) < 1e-4);
}

#[test]
fn amplitude_from_lognormal_moments() {
    let x = sample_fgn(Hurst::new(0.5).unwrap(), 200_000, 8).unwrap();
    let beta = 0.7;
    let lam = Trace::new(
        1.0,
        x.values().iter().map(|v| 2.0 * (beta * v).exp()).collect(),
    )
    .unwrap();
    let a = amplitude_from_moments(&lam).unwrap();
    assert!((a - beta * beta).abs() < 0.02, "A {a}");
    let flat = Trace::new(1.0, vec![1.0; 10]).unwrap();
    assert!(amplitude_from_moments(&flat).is_err());
    let negative = Trace::new(1.0, vec![-1.0, -2.0]).unwrap();
    assert!(amplitude_from_moments(&negative).is_err());
}

#[test]
fn laplace_of_an_exponential() {
    let c = tabulated(1e-3, 50_001, |t| (-t).exp());
    let (lo, hi) = resolvable_band(&c).unwrap();
    assert!((lo - 0.2).abs() < 1e-12 && (hi - 100.0).abs() < 1e-9);
    let l = laplace_transform_curve(&c, &[1.0, 2.0]).unwrap();
    assert!((l.values()[0] - 0.5).abs() < 1e-4);
    assert!((l.values()[1] - 1.0 / 3.0).abs() < 1e-4);
    assert!(matches!(
        laplace_transform_curve(&c, &[0.1]),
        Err(Error::Band { .. })
    ));
    assert!(matches!(
        laplace_transform_curve(&c, &[500.0]),
        Err(Error::Band { .. })
    ));
    let grid = default_s_grid(&c, 5).unwrap();
    assert!(grid[0] >= lo * (1.0 - 1e-12) && *grid.last().unwrap() <= hi * (1.0 + 1e-12));
}

#[test]
fn laplace_of_a_mittag_leffler_relaxation() {
    // s^(a-1) / (s^a + 1) = 1/2 at s = 1.
    let c = tabulated(1e-3, 100_001, |t| mittag_leffler(0.5, -t.sqrt()).unwrap());
    let l = laplace_transform_curve(&c, &[1.0]).unwrap();
    assert!((l.values()[0] - 0.5).abs() < 1e-3, "{}", l.values()[0]);
}

#[test]
fn kernel_recovery_round_trips() {
    let p = PhysicalParams::harmonic(1.3, 0.7, 0.9, 0.6).unwrap();
    let s: Vec<f64> = (0..20).map(|i| 0.05 * 1.4f64.powi(i)).collect();
    let k = LaplaceCurve::new(s.clone(), s.iter().map(|x| 1.0 / (1.0 + x)).collect()).unwrap();
    let back = recover_kernel(&covariance_from_kernel(&k, &p).unwrap(), &p).unwrap();
    for (a, b) in back.values().iter().zip(k.values()) {
        assert!(rel(*a, *b) < 1e-12);
    }
}

#[test]
fn recovered_kernel_matches_the_power_law() {
    let h = Hurst::new(0.75).unwrap();
    let p = PhysicalParams::harmonic(1.0, 0.4, 1.0, 1.0).unwrap();
    let s: Vec<f64> = (0..15).map(|i| 0.01 * 1.6f64.powi(i)).collect();
    let c = LaplaceCurve::new(
        s.clone(),
        s.iter()
            .map(|x| overdamped_laplace(&p, h, *x).unwrap())
            .collect(),
    )
    .unwrap();
    let k = recover_kernel(&c, &p).unwrap();
    for (x, v) in s.iter().zip(k.values()) {
        assert!(rel(*v, kernel_laplace(h, *x).unwrap()) < 1e-6, "s {x}");
    }
}

#[test]
fn recovery_errors() {
    let p = PhysicalParams::harmonic(1.0, 1.0, 1.0, 2.0).unwrap();
    // k_B T - m psi s c = 0.
    let c = LaplaceCurve::new(vec![0.5], vec![1.0]).unwrap();
    assert!(matches!(
        recover_kernel(&c, &p),
        Err(Error::SingularRecovery { .. })
    ));
    let free = PhysicalParams::free(1.0, 1.0, 1.0).unwrap();
    assert!(recover_kernel(&c, &free).is_err());
}

#[test]
fn potential_of_a_gaussian_trace_is_quadratic() {
    let sd = 0.6;
    let x = sample_fgn(Hurst::new(0.5).unwrap(), 100_000, 9).unwrap();
    let t = Trace::new(1.0, x.values().iter().map(|v| sd * v).collect()).unwrap();
    let bins = freedman_diaconis_bins(&t);
    assert!((10..=1000).contains(&bins));
    let u = reconstruct_potential(&t, bins, 1.0).unwrap();
    assert!(u.u.iter().all(|v| *v >= 0.0));
    assert!(u.u.contains(&0.0));
    let k = u.curvature().unwrap();
    assert!(rel(k, 1.0 / (sd * sd)) < 0.1, "curvature {k}");

    let flat = Trace::new(1.0, vec![0.3; 5000]).unwrap();
    assert!(reconstruct_potential(&flat, 20, 1.0).is_err());
    assert!(reconstruct_potential(&t, 5, 1.0).is_err());
    assert!(reconstruct_potential(&t, 20, 0.0).is_err());
}

#[test]
fn hurst_from_power_laws() {
    let lags: Vec<f64> = (1..=1000).map(|k| k as f64).collect();
    let sub = CovarianceCurve::new(
        lags.clone(),
        lags.iter().map(|t| 2.0 * t.sqrt()).collect(),
        CurveKind::Msd,
    )
    .unwrap();
    let e = estimate_hurst_msd(&sub, None).unwrap();
    assert!((e.h - 0.75).abs() < 1e-12 && !e.boundary);
    assert!(rel(e.prefactor, 2.0) < 1e-10);
    let diff = CovarianceCurve::new(lags.clone(), lags.clone(), CurveKind::Msd).unwrap();
    let e = estimate_hurst_msd(&diff, None).unwrap();
    assert!((e.h - 0.5).abs() < 1e-12 && e.boundary);
    assert!(estimate_hurst_msd(&sub, Some((10.0, 100.0))).is_err());
}

#[test]
fn line_fit_is_exact_on_a_line() {
    let x = [0.0, 1.0, 2.0, 5.0];
    let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
    let f = fit_line(&x, &y).unwrap();
    assert!((f.slope + 0.5).abs() < 1e-14 && (f.intercept - 3.0).abs() < 1e-14);
    assert!(f.slope_stderr < 1e-12);
    assert!(fit_line(&[1.0, 1.0], &[0.0, 1.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn autocorrelation_is_bounded_by_its_zero_lag(seed in any::<u64>(), n in 20usize..400) {
        let x = sample_fgn(Hurst::new(0.8).unwrap(), n, seed).unwrap();
        let c = empirical_autocorrelation(&x, n / 2).unwrap();
        prop_assert!(c.values.iter().all(|v| v.abs() <= c.values[0] * (1.0 + 1e-12)));
    }

    #[test]
    fn model_autocorrelation_is_normalized(h in 0.55f64..0.95, r in 0.1f64..5.0, a in 0.05f64..3.0, t in 0.0f64..20.0) {
        prop_assert!((normalized_lifetime_model(h, r, a, 0.0) - 1.0).abs() < 1e-12);
        let v = normalized_lifetime_model(h, r, a, t);
        prop_assert!(v > 0.0 && v <= 1.0 + 1e-12);
    }
}
