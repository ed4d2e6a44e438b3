use proptest::prelude::*;
use subdiff::fgn::{fgn_autocovariance, sample_fgn, FgnSampler};
use subdiff::lifetime::{
    centered_moment, empirical_multi_time, four_step_corr, lifetime_autocov, lifetime_map,
    lognormal_moment, three_step_corr, time_symmetry_pairs, LifetimeParams,
};
use subdiff::{Hurst, Trace};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn decay(t: f64) -> f64 {
    0.8 * (-t.abs().powf(0.6)).exp()
}

#[test]
fn parameters_are_validated() {
    assert!(LifetimeParams::new(0.0, 1.0, 0.0).is_err());
    assert!(LifetimeParams::new(1.0, f64::NAN, 0.0).is_err());
    assert!(LifetimeParams::new(1.0, 1.0, f64::INFINITY).is_err());
    assert!(LifetimeParams::new(2.0, -0.5, 0.1).is_ok());
}

#[test]
fn zero_beta_gives_a_constant_rate() {
    let x = sample_fgn(Hurst::new(0.7).unwrap(), 200, 1).unwrap();
    let lam = lifetime_map(&x, &LifetimeParams::new(3.0, 0.0, 0.4).unwrap());
    assert!(lam.values().iter().all(|v| *v == 3.0));
}

#[test]
fn map_round_trips() {
    let x = sample_fgn(Hurst::new(0.7).unwrap(), 500, 2).unwrap();
    let lp = LifetimeParams::new(1.7, 0.9, -0.3).unwrap();
    let lam = lifetime_map(&x, &lp);
    assert_eq!(lam.len(), x.len());
    assert_eq!(lam.dt(), x.dt());
    assert_eq!(lam.seed(), x.seed());
    for (l, v) in lam.values().iter().zip(x.values()) {
        assert!(l.is_finite() && *l > 0.0);
        assert!(((l / lp.k0).ln() / lp.beta - lp.x_eq - v).abs() < 1e-12);
    }
}

#[test]
fn lognormal_moment_special_cases() {
    assert!(
        (lognormal_moment(0.7, decay, &[2.0]).unwrap() - (0.5 * 0.49 * 0.8f64).exp()).abs() < 1e-15
    );
    assert_eq!(lognormal_moment(0.0, decay, &[0.0, 1.0, 3.0]).unwrap(), 1.0);
    assert!(lognormal_moment(0.7, decay, &[2.0, 1.0]).is_err());
}

#[test]
fn lognormal_moment_matches_monte_carlo() {
    let h = Hurst::new(0.75).unwrap();
    let cov = |t: f64| fgn_autocovariance(h, t.round() as u64);
    let a = 0.4;
    let idx = [0usize, 1, 3];
    let times: Vec<f64> = idx.iter().map(|k| *k as f64).collect();
    let exact = lognormal_moment(a, cov, &times).unwrap();
    let sampler = FgnSampler::new(h, 4).unwrap();
    let m = 100_000;
    let draws: Vec<f64> = (0..m)
        .map(|i| {
            let p = sampler.path(12, i);
            (a * idx.iter().map(|k| p.values()[*k]).sum::<f64>()).exp()
        })
        .collect();
    let mean = draws.iter().sum::<f64>() / m as f64;
    let sd = (draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt();
    assert!(
        (mean - exact).abs() < 4.0 * sd / (m as f64).sqrt(),
        "{mean} vs {exact}"
    );
}

#[test]
fn zero_lag_autocovariance_is_the_lognormal_variance() {
    let lp = LifetimeParams::new(1.5, 0.9, 0.2).unwrap();
    let s2 = lp.beta * lp.beta * decay(0.0);
    let expected = (lp.k0 * (lp.beta * lp.x_eq).exp()).powi(2) * s2.exp() * s2.exp_m1();
    assert!(rel(lifetime_autocov(&lp, decay, 0.0), expected) < 1e-14);
    assert_eq!(
        lifetime_autocov(&lp, decay, -1.3),
        lifetime_autocov(&lp, decay, 1.3)
    );
}

#[test]
fn closed_forms_agree_with_the_subset_expansion() {
    let lp = LifetimeParams::new(1.2, 0.9, 0.3).unwrap();
    for t in [0.0, 0.2, 1.0, 4.0] {
        let c = centered_moment(&lp, decay, &[0.0, t]).unwrap();
        assert!(
            (lifetime_autocov(&lp, decay, t) - c).abs() <= 1e-12 * c.abs().max(1.0),
            "t {t}"
        );
    }
    for (t1, t2) in [(0.3, 0.5), (1.0, 2.0), (2.0, 1.0), (0.0, 0.7)] {
        let c = centered_moment(&lp, decay, &[0.0, t1, t1 + t2]).unwrap();
        assert!(
            (three_step_corr(&lp, decay, t1, t2) - c).abs() <= 1e-10 * c.abs().max(1.0),
            "{t1} {t2}"
        );
    }
    for (t1, t2, t3) in [(0.3, 0.5, 0.2), (1.0, 2.0, 0.5), (0.1, 0.1, 3.0)] {
        let c = centered_moment(&lp, decay, &[0.0, t1, t1 + t2, t1 + t2 + t3]).unwrap();
        let f = four_step_corr(&lp, decay, t1, t2, t3);
        assert!(
            (f - c).abs() <= 1e-9 * c.abs().max(1.0),
            "{t1} {t2} {t3}: {f} vs {c}"
        );
    }
}

#[test]
fn four_step_degenerate_case_is_the_lognormal_kurtosis() {
    let lp = LifetimeParams::new(1.0, 0.8, 0.0).unwrap();
    let s2 = lp.beta * lp.beta * decay(0.0);
    let w = s2.exp();
    let mu = (0.5 * s2).exp();
    let expected = mu.powi(4) * (w.powi(6) - 4.0 * w.powi(3) + 6.0 * w - 3.0);
    assert!(rel(four_step_corr(&lp, decay, 0.0, 0.0, 0.0), expected) < 1e-12);
    assert_eq!(four_step_corr(&lp, |_| 0.0, 0.5, 1.0, 2.0), 0.0);
}

#[test]
fn time_symmetry_columns_coincide() {
    let lp = LifetimeParams::new(1.0, 0.9, 0.0).unwrap();
    let rows = time_symmetry_pairs(&lp, decay, &[0.1, 0.5, 2.0]).unwrap();
    assert_eq!(rows.len(), 3);
    for (t, a, b) in rows {
        assert!((a - b).abs() <= 1e-14 * a.abs(), "t {t}");
        assert!(a > 0.0);
    }
    assert!(time_symmetry_pairs(&lp, decay, &[0.0, 1.0]).is_err());
}

#[test]
fn empirical_multi_time_basics() {
    let x = Trace::new(1.0, vec![1.0, 3.0, 2.0, 6.0]).unwrap();
    assert!(empirical_multi_time(&x, &[0]).unwrap().abs() < 1e-15);
    assert!((empirical_multi_time(&x, &[0, 0]).unwrap() - x.variance()).abs() < 1e-12);
    // Means removed: -2, 0, -1, 3.
    assert!((empirical_multi_time(&x, &[0, 1]).unwrap() - (0.0 + 0.0 - 3.0) / 3.0).abs() < 1e-12);
    assert!(empirical_multi_time(&x, &[0, 4]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn three_step_is_symmetric(t1 in 0.0f64..5.0, t2 in 0.0f64..5.0, beta in -1.5f64..1.5) {
        let lp = LifetimeParams::new(1.0, beta, 0.1).unwrap();
        let a = three_step_corr(&lp, decay, t1, t2);
        let b = three_step_corr(&lp, decay, t2, t1);
        // The bracket cancels first-order terms of size beta^2 C.
        let b2 = beta * beta;
        let first = b2 * (decay(t1) + decay(t2) + decay(t1 + t2));
        let scale = (0.3 * beta + 1.5 * b2 * decay(0.0)).exp() * first;
        prop_assert!((a - b).abs() <= 1e-13 * a.abs() + 8.0 * f64::EPSILON * scale);
    }

    #[test]
    fn autocovariance_is_positive_for_positive_covariance(t in 0.0f64..50.0, beta in 0.01f64..2.0) {
        let lp = LifetimeParams::new(1.0, beta, 0.0).unwrap();
        prop_assert!(lifetime_autocov(&lp, decay, t) > 0.0);
    }
}
