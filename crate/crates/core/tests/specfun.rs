use fliess_core::scalar::ratio;
use fliess_core::specfun::{
    appendix_a_failures, appendix_a_full_sum, appendix_a_full_sum_exact, appendix_a_inner_sum,
    appendix_a_limit, bessel_i0, bessel_j, bessel_j_all, bessel_j_exact, bessel_j_series,
    bessel_j_via_0f1, beta_int, check_multiplication_identity, check_sine_neumann_identity, pfq,
    pochhammer, PFQParams, SpecFunError, TOL,
};
use fliess_core::{Rational, Scalar};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn q(n: i64) -> Rational {
    ratio(n, 1)
}

fn params(upper: &[(i64, i64)], lower: &[(i64, i64)]) -> PFQParams {
    PFQParams::new(
        upper.iter().map(|&(p, d)| ratio(p, d)).collect(),
        lower.iter().map(|&(p, d)| ratio(p, d)).collect(),
    )
    .unwrap()
}

#[test]
fn raw_series_matches_0f1_form() {
    for n in 0..=10 {
        for i in 0..=60 {
            let x = i as f64 * 0.1;
            let a = bessel_j_series(n, x, TOL);
            let b = bessel_j_via_0f1(n, x).unwrap();
            assert!((a - b).abs() < 1e-12, "J_{n}({x}): {a} vs {b}");
        }
    }
}

#[test]
fn recurrence_and_series_agree_at_the_switch() {
    // Both evaluation routes are valid near x = 8.
    for n in 0..=12 {
        let x = 8.0;
        let all = bessel_j_all(12, x + 1e-9);
        assert!((all[n] - bessel_j_series(n, x, TOL)).abs() < 1e-9, "n = {n}");
    }
}

#[test]
fn large_argument_reference_values() {
    // mpmath.besselj at 30 digits.
    assert!((bessel_j(0, 100.0, TOL) - 0.019_985_850_304_223_122_4).abs() < 1e-13);
    assert!((bessel_j(1, 50.0, TOL) + 0.097_511_828_125_175_137_7).abs() < 1e-13);
    assert!((bessel_j(5, 20.0, TOL) - 0.151_169_767_982_394_97).abs() < 1e-12);
}

#[test]
fn exact_partial_sums_converge_to_the_float_value() {
    let x = ratio(3, 2);
    for n in 0..=6 {
        let exact = bessel_j_exact(n, &x, 25).as_f64();
        assert!((exact - bessel_j(n, 1.5, TOL)).abs() < 1e-15);
    }
    assert_eq!(bessel_j_exact(0, &Rational::zero(), 5), Rational::one());
    assert_eq!(bessel_j_exact(3, &Rational::zero(), 5), Rational::zero());
}

#[test]
fn closed_form_hypergeometrics() {
    let z: f64 = 0.3;
    let e = params(&[], &[]).eval(z, TOL, 1000).unwrap();
    assert!((e - z.exp()).abs() < 1e-15);
    let f = params(&[(1, 1)], &[(2, 1)]).eval(z, TOL, 1000).unwrap();
    assert!((f - z.exp_m1() / z).abs() < 1e-15);
    let g = params(&[(1, 1), (1, 1)], &[(2, 1)]).eval(z, TOL, 10_000).unwrap();
    assert!((g + (1.0 - z).ln() / z).abs() < 1e-14);
    let h = params(&[(1, 1), (1, 2)], &[(3, 2)]).eval(z * z, TOL, 10_000).unwrap();
    assert!((h - z.atanh() / z).abs() < 1e-15);
    let poly = params(&[(-3, 1), (1, 1)], &[(1, 1)]);
    // 2F1(-3, 1; 1; z) = (1 - z)^3, even outside the unit disk.
    assert!((poly.eval(2.5, TOL, 100).unwrap() - (1.0f64 - 2.5).powi(3)).abs() < 1e-12);
}

#[test]
fn hypergeometric_domain_errors() {
    assert!(matches!(
        PFQParams::new(vec![q(1)], vec![q(-2)]),
        Err(SpecFunError::PoleInLowerParameter(_))
    ));
    let p = params(&[(1, 1), (1, 1)], &[(2, 1)]);
    assert!(matches!(p.eval(1.0, TOL, 100), Err(SpecFunError::OutsideDisk { .. })));
    assert!(matches!(p.eval(0.5, 0.0, 100), Err(SpecFunError::BadTolerance(_))));
    assert!(matches!(p.eval(0.999, TOL, 10), Err(SpecFunError::NoConvergence(10))));
    let divergent = params(&[(1, 1), (1, 1), (1, 1)], &[(2, 1)]);
    assert!(divergent.eval(0.1, TOL, 100).is_err());
    assert_eq!(divergent.eval(0.0, TOL, 100).unwrap(), 1.0);
}

#[test]
fn exact_hypergeometric_partial_sums() {
    let p = params(&[(1, 2), (1, 1)], &[(3, 2)]);
    let exact = p.eval_exact(&ratio(1, 4), 40).as_f64();
    assert!((exact - pfq(&p, 0.25, TOL, 1000).unwrap()).abs() < 1e-15);
}

#[test]
fn pochhammer_and_beta() {
    assert_eq!(pochhammer(&ratio(1, 2), 3), ratio(15, 8));
    assert_eq!(pochhammer(&q(5), 0), q(1));
    assert_eq!(pochhammer(&2.0f64, 4), 120.0);
    assert_eq!(beta_int(3, 4), ratio(1, 60));
    assert_eq!(beta_int(1, 1), q(1));
}

#[test]
fn appendix_inner_sums_vanish() {
    assert!(appendix_a_failures(60, 25).is_empty());
    for k in 1..=25 {
        assert_eq!(appendix_a_inner_sum(0, k), ratio(1, k as i64));
    }
}

#[test]
fn appendix_full_sum_tends_to_its_limit() {
    for k in [1, 2, 3, 5, 8] {
        let limit = appendix_a_limit(k);
        assert_eq!(appendix_a_full_sum_exact(k, &Rational::zero(), 3), limit);
        for mt in [ratio(1, 2), q(1), q(2)] {
            let err = (appendix_a_full_sum_exact(k, &mt, 50) - &limit).as_f64().abs();
            assert!(err < 1e-12, "k = {k}, Mt = {mt}: {err}");
        }
        let float = appendix_a_full_sum(k, 1.5, 60);
        assert!((float - limit.as_f64()).abs() < 1e-12);
    }
}

#[test]
fn bessel_identities_hold_on_their_grids() {
    for l in 0..=10 {
        for z in [0.0, 0.7, 1.5, 3.0] {
            assert!(check_multiplication_identity(l as f64 / 10.0, z, 40) < 1e-12);
        }
    }
    for i in 0..=50 {
        assert!(check_sine_neumann_identity(i as f64 * 0.1, 40) < 1e-12);
    }
}

proptest! {
    #[test]
    fn i0_kernel_is_symmetric(t in 0.0f64..4.0, frac in 0.0f64..1.0, m in 0.1f64..2.0) {
        let tau = t * frac;
        let a = bessel_i0(2.0 * m * ((t - tau) * tau).sqrt(), TOL);
        let b = bessel_i0(2.0 * m * (tau * (t - tau)).sqrt(), TOL);
        prop_assert!((a - b).abs() <= 1e-15 * a);
        let c = bessel_i0(2.0 * m * ((t - (t - tau)) * (t - tau)).sqrt(), TOL);
        prop_assert!((a - c).abs() <= 1e-12 * a);
    }

    #[test]
    fn partial_sums_are_monotone(
        a in 1i64..8, b in 1i64..8, d in 1i64..8, z in 0.0f64..0.99,
    ) {
        let p = params(&[(a, 2), (b, 3)], &[(d, 2)]);
        let sums = p.partial_sums(z, 60);
        prop_assert!(sums.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn three_term_recurrence(n in 1usize..15, x in 0.5f64..30.0) {
        let js = bessel_j_all(n + 1, x);
        let lhs = js[n - 1] + js[n + 1];
        let rhs = 2.0 * n as f64 / x * js[n];
        prop_assert!((lhs - rhs).abs() < 1e-12, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn neumann_normalization(x in 0.0f64..40.0) {
        let js = bessel_j_all(80, x);
        let s = js[0] + 2.0 * js.iter().skip(2).step_by(2).sum::<f64>();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }
}
