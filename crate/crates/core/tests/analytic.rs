use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use subdiff::analytic::{
    harmonic_covariances, msd_asymptote, msd_free, overdamped_autocovariance,
    overdamped_spectral_density, tabulate, tabulate_spectrum, tau, velocity_autocovariance,
    velocity_spectral_density, AnalyticCurve, AnalyticSpectrum,
};
use subdiff::inference::fit_power_law;
use subdiff::specfun::{fourier_integral, Oscillator, Shape, Tolerance};
use subdiff::trace::log_grid;
use subdiff::{Hurst, PhysicalParams};

fn hurst(h: f64) -> Hurst {
    Hurst::new(h).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn unit_free() -> PhysicalParams {
    PhysicalParams::free(1.0, 1.0, 1.0).unwrap()
}

// Gamma(2.5) = 3 sqrt(pi) / 4.
fn gamma_5_2() -> f64 {
    0.75 * PI.sqrt()
}

#[test]
fn parameter_validation() {
    assert!(PhysicalParams::free(0.0, 1.0, 1.0).is_err());
    assert!(PhysicalParams::free(1.0, -1.0, 1.0).is_err());
    assert!(PhysicalParams::harmonic(1.0, 1.0, 1.0, 0.0).is_err());
    let free = unit_free();
    assert!(tau(&free, hurst(0.75)).is_err());
    let harm = PhysicalParams::harmonic(1.0, 1.0, 1.0, 1.0).unwrap();
    assert!(velocity_autocovariance(&harm, hurst(0.75), 0.0).is_err());
    assert!(msd_asymptote(&free, hurst(0.5), 1.0).is_err());
}

#[test]
fn velocity_spectrum_matches_assembled_quotient() {
    // K~ / |K~+ - i w|^2 with both transforms written out, h = 0.75.
    let h = 0.75;
    let g = gamma_5_2();
    let w: f64 = 1.0;
    let full = 2.0 * g * (h * PI).sin() * w.powf(1.0 - 2.0 * h);
    let half = Complex64::new(g * (h * PI).sin(), -g * (h * PI).cos()) * w.powf(1.0 - 2.0 * h);
    let expected = full / (half - Complex64::new(0.0, w)).norm_sqr();
    assert!(rel(expected, 2.119_054_214_682_251) < 1e-12);
    let v = velocity_spectral_density(&unit_free(), hurst(h), w).unwrap();
    assert!(rel(v, expected) < 1e-12);
}

#[test]
fn velocity_spectrum_white_limit_and_positivity() {
    let p = unit_free();
    for w in [1e-2, 0.5, 1.0] {
        let v = velocity_spectral_density(&p, hurst(0.500_01), w).unwrap();
        assert!(rel(v, 2.0 / (1.0 + w * w)) < 1e-3, "w {w}");
    }
    for w in log_grid(1e-3, 1e3, 61) {
        assert!(velocity_spectral_density(&p, hurst(0.75), w).unwrap() > 0.0);
    }
    let low = velocity_spectral_density(&p, hurst(0.75), 1e-8).unwrap();
    let high = velocity_spectral_density(&p, hurst(0.75), 1e8).unwrap();
    assert!(low < 1e-3 && high < 1e-7);
    assert!(velocity_spectral_density(&p, hurst(0.75), 0.0).is_err());
}

#[test]
fn velocity_autocovariance_limits() {
    let p = PhysicalParams::free(1.7, 0.9, 2.3).unwrap();
    for h in [0.6, 0.8] {
        let c0 = velocity_autocovariance(&p, hurst(h), 0.0).unwrap();
        assert!(rel(c0, 2.3 / 1.7) < 1e-5, "h {h}");
        let a = velocity_autocovariance(&p, hurst(h), 1.3).unwrap();
        let b = velocity_autocovariance(&p, hurst(h), -1.3).unwrap();
        assert_eq!(a, b);
    }
    // Reference from an independent 20-digit oscillatory quadrature.
    let c = velocity_autocovariance(&unit_free(), hurst(0.51), 2.0).unwrap();
    assert!(rel(c, 0.123_397_266_326_163_38) < 1e-7, "{c}");
    assert!((c - (-2.0f64).exp()).abs() < 0.02, "{c}");
}

#[test]
fn msd_free_behaviour() {
    let p = unit_free();
    let h = hurst(0.75);
    assert_eq!(msd_free(&p, h, 0.0).unwrap(), 0.0);
    let ts = log_grid(0.01, 1e3, 25);
    let v: Vec<f64> = ts.iter().map(|t| msd_free(&p, h, *t).unwrap()).collect();
    assert!(v.windows(2).all(|w| w[1] >= w[0]));
    let big = msd_free(&p, h, 1000.0).unwrap();
    assert!(rel(big, msd_asymptote(&p, h, 1000.0).unwrap()) < 0.05);
}

#[test]
fn msd_brownian_limit() {
    let p = unit_free();
    let t: f64 = 20.0;
    let ou = 2.0 * (t - 1.0 + (-t).exp());
    let v = msd_free(&p, hurst(0.505), t).unwrap();
    assert!(rel(v, ou) < 0.05, "{v} vs {ou}");
}

#[test]
fn msd_slope_over_two_decades() {
    let p = unit_free();
    for hv in [0.6, 0.75, 0.9] {
        let ts = log_grid(1e2, 1e4, 9);
        let v: Vec<f64> = ts
            .iter()
            .map(|t| msd_free(&p, hurst(hv), *t).unwrap())
            .collect();
        let slope = fit_power_law(&ts, &v).unwrap().slope;
        assert!(
            (slope - (2.0 - 2.0 * hv)).abs() <= 0.02,
            "h {hv}: slope {slope}"
        );
    }
}

#[test]
fn msd_asymptote_reference_values() {
    let p = unit_free();
    let v = msd_asymptote(&p, hurst(0.75), 1.0).unwrap();
    assert!(rel(v, 1.697_652_726_313_550_2) < 1e-12);
    let near = msd_asymptote(&p, hurst(0.500_001), 1.0).unwrap();
    assert!((near - 2.0).abs() < 1e-4);
    for hv in [0.55, 0.75, 0.95] {
        let a = msd_asymptote(&p, hurst(hv), 3.0).unwrap();
        let b = msd_asymptote(&p, hurst(hv), 6.0).unwrap();
        assert!(rel(b / a, 2f64.powf(2.0 - 2.0 * hv)) < 1e-13);
    }
}

#[test]
fn harmonic_equal_time_values() {
    let p = PhysicalParams::harmonic(1.4, 0.8, 1.9, 0.6).unwrap();
    for hv in [0.6, 0.75, 0.9] {
        let c = harmonic_covariances(&p, hurst(hv), 0.0).unwrap();
        assert!(rel(c.xx, 1.9 / (1.4 * 0.6)) < 1e-5);
        assert!(rel(c.vv, 1.9 / 1.4) < 1e-5);
        assert_eq!(c.xv, 0.0);
        assert_eq!(c.vx, 0.0);
    }
}

#[test]
fn harmonic_cross_term_is_minus_derivative_of_xx() {
    let p = PhysicalParams::harmonic(1.0, 1.0, 1.0, 1.0).unwrap();
    let h = hurst(0.7);
    let (t, d) = (1.2, 1e-3);
    let up = harmonic_covariances(&p, h, t + d).unwrap().xx;
    let dn = harmonic_covariances(&p, h, t - d).unwrap().xx;
    let c = harmonic_covariances(&p, h, t).unwrap();
    let deriv = (up - dn) / (2.0 * d);
    assert!(
        (c.vx + deriv).abs() < 1e-5,
        "vx {} vs -dxx/dt {}",
        c.vx,
        -deriv
    );
    let back = harmonic_covariances(&p, h, -t).unwrap();
    assert!((back.vx + c.vx).abs() < 1e-12);
}

#[test]
fn weak_potential_approaches_free_velocity() {
    let free = unit_free();
    let weak = PhysicalParams::harmonic(1.0, 1.0, 1.0, 1e-4).unwrap();
    let h = hurst(0.75);
    for t in [0.0, 0.5, 1.0, 2.0] {
        let a = harmonic_covariances(&weak, h, t).unwrap().vv;
        let b = velocity_autocovariance(&free, h, t).unwrap();
        assert!(rel(a, b) < 0.01, "t {t}: {a} vs {b}");
    }
}

#[test]
fn displacement_curves_peak_at_the_origin() {
    let p = PhysicalParams::harmonic(1.0, 0.5, 1.0, 2.0).unwrap();
    let lags = log_grid(0.01, 20.0, 30);
    let mut grid = vec![0.0];
    grid.extend(lags);
    for kind in [
        AnalyticCurve::HarmonicXx,
        AnalyticCurve::HarmonicVv,
        AnalyticCurve::Overdamped,
    ] {
        let c = tabulate(&p, hurst(0.7), kind, &grid).unwrap();
        let top = c.values[0].abs();
        assert!(
            c.values.iter().all(|v| v.abs() <= top * (1.0 + 1e-9)),
            "{kind:?}"
        );
    }
}

#[test]
fn tau_reference_values() {
    let h = hurst(0.75);
    let unit = PhysicalParams::harmonic(1.0, 1.0, 1.0, gamma_5_2()).unwrap();
    assert!((tau(&unit, h).unwrap() - 1.0).abs() < 1e-14);
    let p = PhysicalParams::harmonic(1.0, 2.0, 1.0, 1.0).unwrap();
    let expected = (2.0 * gamma_5_2()).powi(2);
    assert!(rel(tau(&p, h).unwrap(), expected) < 1e-13);
    assert!((expected - 7.0685).abs() < 1e-3);
    for hv in [0.55, 0.9] {
        let zeta = 1.0 / statrs::function::gamma::gamma(2.0 * hv + 1.0);
        let q = PhysicalParams::harmonic(1.0, zeta, 1.0, 1.0).unwrap();
        assert!((tau(&q, hurst(hv)).unwrap() - 1.0).abs() < 1e-13);
    }
}

#[test]
fn overdamped_reference_values() {
    let p = PhysicalParams::harmonic(2.0, 1.0, 3.0, 0.5).unwrap();
    assert_eq!(overdamped_autocovariance(&p, hurst(0.7), 0.0).unwrap(), 3.0);
    let unit = PhysicalParams::harmonic(1.0, 1.0, 1.0, 1.0).unwrap();
    let near = overdamped_autocovariance(&unit, hurst(0.500_001), 1.0).unwrap();
    assert!((near - (-1.0f64).exp()).abs() < 1e-5);
    let tau_one = PhysicalParams::harmonic(1.0, 1.0 / gamma_5_2(), 1.0, 1.0).unwrap();
    let v = overdamped_autocovariance(&tau_one, hurst(0.75), 1.0).unwrap();
    assert!(rel(v, 0.427_583_576_155_807) < 1e-10);
}

#[test]
fn overdamped_spectrum_values() {
    let unit = PhysicalParams::harmonic(1.0, 1.0, 1.0, 1.0).unwrap();
    let near = overdamped_spectral_density(&unit, hurst(0.500_001), 1.0).unwrap();
    assert!((near - 1.0).abs() < 1e-4);
    assert!(overdamped_spectral_density(&unit, hurst(0.75), 0.0).is_err());
    // The denominator is a completed square bounded below by sin^2(h pi).
    for hv in [0.55, 0.7, 0.9] {
        let h = hurst(hv);
        let t = tau(&unit, h).unwrap();
        let sn = (hv * PI).sin();
        for w in log_grid(1e-3, 1e3, 41) {
            let y = (t * w).powf(2.0 - 2.0 * hv);
            let v = overdamped_spectral_density(&unit, h, w).unwrap();
            assert!(v > 0.0 && v <= 2.0 * sn * y / w / (sn * sn) * (1.0 + 1e-12));
        }
    }
}

#[test]
fn overdamped_spectrum_is_cosine_transform() {
    let p = PhysicalParams::harmonic(1.0, 1.0 / gamma_5_2(), 1.0, 1.0).unwrap();
    let h = hurst(0.75);
    for w in [0.5, 1.0, 2.0] {
        let f = |t: f64| overdamped_autocovariance(&p, h, t).unwrap();
        let v = 2.0
            * fourier_integral(
                f,
                w,
                Oscillator::Cos,
                &Shape::new(0.0, 0.5).breakpoint(1.0),
                Tolerance::new(1e-12, 1e-8),
            )
            .unwrap()
            .value;
        let s = overdamped_spectral_density(&p, h, w).unwrap();
        assert!(rel(v, s) < 1e-4, "w {w}");
    }
}

#[test]
fn all_spectra_positive() {
    let p = PhysicalParams::harmonic(1.0, 0.7, 1.0, 3.0).unwrap();
    let grid = log_grid(1e-3, 1e3, 61);
    for which in [
        AnalyticSpectrum::HarmonicDisplacement,
        AnalyticSpectrum::Overdamped,
    ] {
        for hv in [0.55, 0.75, 0.95] {
            let s = tabulate_spectrum(&p, hurst(hv), which, &grid).unwrap();
            assert!(
                s.values.iter().all(|v| *v > 0.0 && v.is_finite()),
                "{which:?} h {hv}"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn thermal_velocity_variance(h in 0.52f64..0.98, m in 0.2f64..5.0, zeta in 0.2f64..5.0, kbt in 0.2f64..5.0) {
        let p = PhysicalParams::free(m, zeta, kbt).unwrap();
        let c0 = velocity_autocovariance(&p, hurst(h), 0.0).unwrap();
        prop_assert!(rel(c0, kbt / m) < 1e-4);
    }

    #[test]
    fn thermal_displacement_variance(h in 0.52f64..0.98, m in 0.2f64..5.0, zeta in 0.2f64..5.0, psi in 0.2f64..5.0) {
        let p = PhysicalParams::harmonic(m, zeta, 1.3, psi).unwrap();
        let c = harmonic_covariances(&p, hurst(h), 0.0).unwrap();
        prop_assert!(rel(c.xx, 1.3 / (m * psi)) < 1e-4);
        prop_assert!(rel(overdamped_autocovariance(&p, hurst(h), 0.0).unwrap(), 1.3 / (m * psi)) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn overdamped_positive_and_decreasing(h in 0.51f64..0.99, t in 0.0f64..100.0) {
        let p = PhysicalParams::harmonic(1.0, 1.0, 1.0, 1.0).unwrap();
        let a = overdamped_autocovariance(&p, hurst(h), t).unwrap();
        let b = overdamped_autocovariance(&p, hurst(h), t + 0.1).unwrap();
        prop_assert!(a > 0.0 && b < a);
    }

    #[test]
    fn asymptote_is_positive_power_law(h in 0.501f64..0.999, t in 1e-3f64..1e3) {
        let p = unit_free();
        let a = msd_asymptote(&p, hurst(h), t).unwrap();
        let b = msd_asymptote(&p, hurst(h), 2.0 * t).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!(rel(b / a, 2f64.powf(2.0 - 2.0 * h)) < 1e-12);
    }
}
