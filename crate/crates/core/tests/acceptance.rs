//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints exactly one PASS/FAIL line; exits nonzero on any FAIL.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use common::{q, random_mixed, random_reversible, smooth_inputs, word};
use fliess_core::hankel::{
    hankel_image_on_x0_axis, hankel_rank_lower_bound, lie_rank_lower_bound,
};
use fliess_core::nulling::{
    arctanh_natural_series, arctanh_zero_dynamics, exp_sin_coefficients, global_nulling_input,
    lemma_residual, local_nulling_solve, natural_coefficients, natural_output_coefficients,
    verify_null_global, zero_dynamics,
};
use fliess_core::scalar::{factorial_q, ratio};
use fliess_core::series::{solve_algebraic_fixed_point, AlgebraicRule, MixedLetter};
use fliess_core::simulate::{
    evaluate_fliess, iterated_integral, kernel_profile, kernel_series_equivalence,
    time_reverse_input, KernelSeriesForm,
};
use fliess_core::specfun::{
    appendix_a_full_sum_exact, appendix_a_inner_sum, bessel_i0, check_multiplication_identity,
    check_sine_neumann_identity, TOL,
};
use fliess_core::{Alphabet, Kernel, KernelKind, MaximalKind, Rational, SampledSignal, Scalar, Series};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Outcome of one sub-check inside a criterion.
struct Check {
    label: String,
    ok: bool,
}

#[derive(Default)]
struct Criterion {
    checks: Vec<Check>,
}

impl Criterion {
    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push(Check {
            label: label.into(),
            ok,
        });
    }

    fn within(&mut self, label: &str, value: f64, tol: f64) {
        self.check(format!("{label}: {value:.3e} < {tol:.0e}"), value < tol);
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

// Independent oracles for the symmetry predicates: full enumeration of every
// word up to the truncation degree.

fn oracle_palindromic(c: &Series) -> bool {
    Alphabet::siso()
        .words_up_to(c.trunc_degree())
        .iter()
        .all(|w| c.coefficient(w).unwrap().is_zero() || *w == w.reverse())
}

fn oracle_exchangeable(c: &Series) -> bool {
    let words = Alphabet::siso().words_up_to(c.trunc_degree());
    words.iter().all(|a| {
        words
            .iter()
            .filter(|b| a.count(0) == b.count(0) && a.count(1) == b.count(1))
            .all(|b| c.coefficient(a).unwrap() == c.coefficient(b).unwrap())
    })
}

fn oracle_reversible(c: &Series) -> bool {
    Alphabet::siso()
        .words_up_to(c.trunc_degree())
        .iter()
        .all(|w| c.coefficient(w).unwrap() == c.coefficient(&w.reverse()).unwrap())
}

fn series(terms: &[(i64, &str)], trunc: usize) -> Series {
    Series::from_terms(
        Alphabet::siso(),
        trunc,
        terms.iter().map(|&(c, s)| (word(s), q(c))),
    )
    .unwrap()
}

fn criterion_1(c: &mut Criterion) {
    let cr = series(&[(1, "x0x1"), (1, "x1x0")], 2);
    c.check("x0x1+x1x0 reversible", cr.is_coefficient_reversible());
    c.check("x0x1+x1x0 not palindromic", !cr.is_palindromic());
    c.check("x0x1+x1x0 exchangeable", cr.is_exchangeable());
    let d = series(&[(1, "x0x1")], 2);
    c.check("x0x1 not reversible", !d.is_coefficient_reversible());
    let p = series(&[(1, "x0x1x0")], 3);
    let class = p.palindrome_class();
    c.check("x0x1x0 reversible", p.is_coefficient_reversible());
    c.check("x0x1x0 odd palindromic", class.palindromic && class.odd && !class.even);
    c.check("x0x1x0 not exchangeable", !p.is_exchangeable());

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut disagreements = 0;
    let mut both = 0;
    for _ in 0..500 {
        let deg = 1 + (rand::Rng::gen_range(&mut rng, 0..5));
        let s = random_mixed(&mut rng, deg);
        let brute = oracle_palindromic(&s) && oracle_exchangeable(&s);
        both += usize::from(brute);
        if s.is_palindromic_and_exchangeable_form() != brute
            || s.is_palindromic() != oracle_palindromic(&s)
            || s.is_exchangeable() != oracle_exchangeable(&s)
            || s.is_coefficient_reversible() != oracle_reversible(&s)
        {
            disagreements += 1;
        }
    }
    c.check(
        format!("P∩E form vs brute force on 500 series ({both} in P∩E): {disagreements} disagreements"),
        disagreements == 0 && both > 50,
    );
}

fn criterion_2(c: &mut Criterion) {
    let dt = 1e-3;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let deg = 1 + rand::Rng::gen_range(&mut rng, 0..4);
        let s = random_reversible(&mut rng, deg);
        for (_, f) in smooth_inputs() {
            let u = SampledSignal::from_fn(dt, 1.0, f).unwrap();
            for t in [0.5, 1.0] {
                let ut = time_reverse_input(&u, t).unwrap();
                let a = evaluate_fliess(&s, &u, t).unwrap();
                let b = evaluate_fliess(&s, &ut, t).unwrap();
                worst = worst.max((a - b).abs());
            }
        }
    }
    c.within("input reversal, 20 series × 5 inputs × 2 times", worst, 5e-6);

    let mut worst_word: f64 = 0.0;
    for (_, f) in smooth_inputs() {
        let u = SampledSignal::from_fn(dt, 1.0, f).unwrap();
        for t in [0.5, 1.0] {
            let ut = time_reverse_input(&u, t).unwrap();
            for w in Alphabet::siso().words_up_to(4) {
                let a = iterated_integral(&w, &u, t).unwrap();
                let b = iterated_integral(&w.reverse(), &ut, t).unwrap();
                worst_word = worst_word.max((a - b).abs());
            }
        }
    }
    c.within("word-level E_η[u] = E_η̃[u_t], |η| ≤ 4", worst_word, 5e-6);
}

fn criterion_3(c: &mut Criterion) {
    let values = [q(1), q(2), ratio(1, 3)];
    let mut bad = Vec::new();
    for k in &values {
        for m in &values {
            for n in 0..=12 {
                let h = hankel_rank_lower_bound(MaximalKind::PalindromicGlobal, k, m, n).unwrap();
                let l = lie_rank_lower_bound(MaximalKind::PalindromicGlobal, k, m, n).unwrap();
                if h != n + 1 || l != n + 1 {
                    bad.push(format!("K={k} M={m} n={n}: {h}, {l}"));
                }
            }
        }
    }
    c.check(
        format!("Hankel and Lie probes equal n+1 for n ≤ 12, 9 (K, M) pairs; failures: {bad:?}"),
        bad.is_empty(),
    );

    // H_c(p_0) = K, H_c(p_1) = -KM² x0, H_c(p_2) = -2KM² + KM⁴ x0²,
    // H_c(p_3) = 3KM⁴ x0 - KM⁶ x0³.
    let mut listed_ok = true;
    for k in &values {
        for m in &values {
            let m2 = m * m;
            let m4 = &m2 * &m2;
            let m6 = &m4 * &m2;
            let z = Rational::zero();
            let listed = [
                vec![k.clone(), z.clone(), z.clone(), z.clone()],
                vec![z.clone(), -(k * &m2), z.clone(), z.clone()],
                vec![-(q(2) * k * &m2), z.clone(), k * &m4, z.clone()],
                vec![z.clone(), q(3) * k * &m4, z.clone(), -(k * &m6)],
            ];
            for (i, expected) in listed.iter().enumerate() {
                let got = hankel_image_on_x0_axis(MaximalKind::PalindromicGlobal, k, m, i, 3).unwrap();
                listed_ok &= got == *expected;
            }
        }
    }
    c.check("H_c(p_i) equals the listed polynomials for i = 0..3", listed_ok);
}

fn criterion_4(c: &mut Criterion) {
    let global = Kernel::new(KernelKind::Global, 1.0, 1.0).unwrap();
    let mut worst_bessel: f64 = 0.0;
    let mut worst_word: f64 = 0.0;
    for t in [0.5, 1.0, 2.0, 3.0] {
        worst_bessel = worst_bessel.max(kernel_series_equivalence(&global, KernelSeriesForm::Bessel, t, 60, 300));
        worst_word = worst_word.max(kernel_series_equivalence(&global, KernelSeriesForm::WordSeries, t, 60, 300));
    }
    c.within("global Bessel series vs K I_0, t ≤ 3, 60 terms", worst_bessel, 1e-10);
    c.within("global word series vs K I_0, t ≤ 3, 60 terms", worst_word, 1e-10);

    let local = Kernel::new(KernelKind::Local, 1.0, 1.0).unwrap();
    let mut local_word: f64 = 0.0;
    let mut local_bessel: f64 = 0.0;
    for t in [0.1, 0.25, 0.4, 0.5] {
        local_word = local_word.max(kernel_series_equivalence(&local, KernelSeriesForm::WordSeries, t, 80, 300));
        local_bessel = local_bessel.max(kernel_series_equivalence(&local, KernelSeriesForm::Bessel, t, 80, 300));
    }
    c.within("local word series vs K/√(1-4M²(t-τ)τ), Mt ≤ 0.5, 80 terms", local_word, 1e-8);
    c.within(
        "local Bessel series K Σ (2n)!/n! (M²t)^n J_n(2Mτ) vs K/√(1-4M²(t-τ)τ), Mt ≤ 0.5, 80 terms",
        local_bessel,
        1e-8,
    );

    let mut profiles_ok = true;
    for t in [1.0, 2.0, 3.0] {
        let p = kernel_profile(&global, t, 200).unwrap();
        profiles_ok &= p.values()[0] == 1.0;
        profiles_ok &= p
            .times()
            .zip(p.values())
            .all(|(tau, v)| (v - bessel_i0(2.0 * ((t - tau) * tau).max(0.0).sqrt(), TOL)).abs() < 1e-12);
        profiles_ok &= p.to_csv_with("tau", "value").starts_with("tau,value\n0,1\n");
    }
    for m in [0.25, 0.5, 0.75, 0.9] {
        let k = Kernel::new(KernelKind::Local, 1.0, m).unwrap();
        let p = kernel_profile(&k, 1.0, 200).unwrap();
        profiles_ok &= p.values()[0] == 1.0;
        let peak = 1.0 / (1.0 - m * m).sqrt();
        profiles_ok &= (p.values()[100] - peak).abs() < 1e-12;
    }
    c.check("kernel profiles for t = 1, 2, 3 (global) and M < 1 at t = 1 (local)", profiles_ok);
}

fn criterion_5(c: &mut Criterion) {
    for k in 1..=3 {
        let natural = BTreeMap::from([(k, 1.0)]);
        let r = verify_null_global(&natural, 1.0, 1.0, 5.0, 1e-3).unwrap();
        c.within(&format!("sup |F_{{x0^{k} + c_F}}[u_{k}*]| on [0, 5]"), r.sup_abs, 1e-6);
    }
    let mut worst: f64 = 0.0;
    for k in 1..=6 {
        worst = worst.max(lemma_residual(k, 1.0, 5.0, 1e-3).unwrap());
    }
    c.within("lemma residual for k ≤ 6 on [0, 5]", worst, 1e-6);
}

fn sine_natural(terms: usize) -> BTreeMap<usize, f64> {
    (1..=terms)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            (2 * k, sign * 2.0 * k as f64)
        })
        .collect()
}

fn criterion_6(c: &mut Criterion) {
    let natural = sine_natural(40);
    let u = global_nulling_input(&natural, 1.0, 1.0, 1e-3, 5.0).unwrap();
    let err = u
        .times()
        .zip(u.values())
        .map(|(t, v)| (v + (2.0 * t).sin()).abs())
        .fold(0.0, f64::max);
    c.within("Neumann u* vs -sin(2t) on [0, 5], 40 terms", err, 1e-8);

    let r = verify_null_global(&natural, 1.0, 1.0, 5.0, 1e-3).unwrap();
    c.within("output residual on [0, 5]", r.sup_abs, 1e-6);

    let u_long = SampledSignal::from_fn(1e-3, 50.0, |t| -(2.0 * t).sin()).unwrap();
    let zd = zero_dynamics(&u_long, &natural, 1.0, 4).unwrap();
    let z2 = zd.state(2);
    let at25 = z2.values()[z2.index_of(25.0).unwrap()];
    let at50 = z2.values()[z2.index_of(50.0).unwrap()];
    c.check(
        format!("zero dynamics grow: |z_2(50)| = {:.4} > |z_2(25)| = {:.4}", at50.abs(), at25.abs()),
        at50.abs() > at25.abs(),
    );
    let z0_ok = (1..=4).all(|n| {
        let expected = if n % 2 == 1 {
            0.0
        } else {
            let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
            -sign / factorial_q(n - 1).as_f64()
        };
        (zd.state(n).values()[0] - expected).abs() < 1e-15
    });
    c.check("z_n(0) = (c, x0^n)/n!", z0_ok);
}

fn criterion_7(c: &mut Criterion) {
    for (k, m) in [(q(1), q(1)), (q(2), ratio(1, 2))] {
        let cn = arctanh_natural_series(&m, 21);
        let y_n = natural_output_coefficients(&natural_coefficients(&cn), 21);
        let sol = local_nulling_solve(&y_n, &k, &m, 10).unwrap();
        let expected_u0 = -(&m / &k);
        let exact = sol.coefficients[0] == expected_u0
            && sol.coefficients[1..].iter().all(Zero::is_zero)
            && sol.residual.iter().all(Zero::is_zero);
        c.check(format!("arctanh solve K={k} M={m}: u*_0 = -M/K, rest 0"), exact);

        let (kf, mf) = (k.as_f64(), m.as_f64());
        let t_end = 0.8 / mf;
        let u = SampledSignal::constant(1e-3, t_end, -mf / kf).unwrap();
        let natural: BTreeMap<usize, f64> = natural_coefficients(&cn)
            .into_iter()
            .map(|(n, v)| (n, v.as_f64()))
            .collect();
        let zd = zero_dynamics(&u, &natural, mf, 4).unwrap();
        let mut worst: f64 = 0.0;
        for n in 1..=4 {
            for (i, t) in zd.state(n).times().enumerate() {
                let closed = arctanh_zero_dynamics(n, kf, mf, t).unwrap();
                worst = worst.max((closed - zd.state(n).values()[i]).abs());
            }
        }
        c.within(&format!("closed-form z_n vs integration, n ≤ 4, Mt ≤ 0.8, K={k} M={m}"), worst, 1e-6);
    }
}

fn criterion_8(c: &mut Criterion) {
    let y_n = exp_sin_coefficients(21);
    let sol = local_nulling_solve(&y_n, &1.0, &1.0, 10).unwrap();
    let residual = |t: f64| {
        let y_natural = t.exp() * (2.0 * std::f64::consts::PI * t).sin();
        (y_natural + sol.forced_output(1.0, 1.0, t).unwrap()).abs()
    };
    let sup = (0..=60)
        .map(|i| residual(i as f64 * 0.01))
        .fold(0.0, f64::max);
    c.within("sup |y_N + y_F| on [0, 0.6], degree-20 input", sup, 1e-3);
    let (r5, r9) = (residual(0.5), residual(0.9));
    c.check(format!("residual grows: {r9:.3e} at 0.9 > {r5:.3e} at 0.5"), r9 > r5);
}

fn criterion_9(c: &mut Criterion) {
    let mut zeros = 0;
    for ell in 1..=60 {
        for k in 1..=25 {
            zeros += usize::from(appendix_a_inner_sum(ell, k).is_zero());
        }
    }
    c.check(format!("inner sums zero: {zeros}/1500"), zeros == 1500);
    let mut worst: f64 = 0.0;
    for k in [1, 2, 5] {
        let limit = Rational::one() / (q(k as i64) * factorial_q(k));
        for mt in [0, 1, 2] {
            let s = appendix_a_full_sum_exact(k, &q(mt), 60);
            worst = worst.max((s - &limit).as_f64().abs());
        }
    }
    c.within("full double sum vs 1/(k·k!), k ∈ {1,2,5}, Mt ∈ {0,1,2}", worst, 1e-10);
}

fn char_x(deg: usize) -> Series {
    Series::from_terms(Alphabet::siso(), deg, [(word("x0"), q(1)), (word("x1"), q(1))]).unwrap()
}

fn criterion_10(c: &mut Criterion) {
    let ch = char_x(1);
    let mut shuffle_pow = ch.clone();
    let mut concat_pow = ch.clone();
    let mut shuffle_ok = true;
    for k in 2..=4 {
        shuffle_pow = shuffle_pow.shuffle(&ch, k).unwrap();
        concat_pow = concat_pow.concat(&ch, k).unwrap();
        shuffle_ok &= shuffle_pow == concat_pow.scale(&factorial_q(k));
    }
    c.check("(char X)^⧢k = k!(char X)^k for k ≤ 4", shuffle_ok);

    let mut fixed_ok = true;
    for (k, m) in [(q(1), q(1)), (q(2), ratio(1, 3)), (ratio(3, 2), q(2))] {
        let rule = AlgebraicRule::new(
            0,
            vec![
                (k.clone(), vec![MixedLetter::X(1)]),
                (&m * &m, vec![MixedLetter::X(0), MixedLetter::Z(0), MixedLetter::X(0)]),
            ],
        );
        let sol = solve_algebraic_fixed_point(&[rule], Alphabet::siso(), 21).unwrap();
        let maximal = Series::maximal(MaximalKind::PalindromicGlobal, Alphabet::siso(), &k, &m, 21).unwrap();
        fixed_ok &= sol[0] == maximal;
    }
    c.check("fixed point of z = Kx1 + M²x0zx0 equals the maximal series to degree 21", fixed_ok);

    let mut mult: f64 = 0.0;
    for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
        for z in [0.5, 1.0, 2.0, 3.0] {
            mult = mult.max(check_multiplication_identity(lambda, z, 40));
        }
    }
    c.within("Bessel multiplication identity, λ ∈ [0,1], z ≤ 3, 40 terms", mult, 1e-10);
    let mut sine: f64 = 0.0;
    for i in 0..=10 {
        sine = sine.max(check_sine_neumann_identity(i as f64 * 0.5, 40));
    }
    c.within("(2k)² J_{2k} sine identity, z ∈ [0, 5], 40 terms", sine, 1e-10);
}

fn main() -> ExitCode {
    let criteria: [(&str, fn(&mut Criterion)); 10] = [
        ("symmetry classification", criterion_1),
        ("input reversal", criterion_2),
        ("rank probes", criterion_3),
        ("kernel equivalence", criterion_4),
        ("global nulling", criterion_5),
        ("sine example", criterion_6),
        ("local nulling, arctanh", criterion_7),
        ("local nulling, exp·sin", criterion_8),
        ("binomial double sum", criterion_9),
        ("algebra and identities", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut c = Criterion::default();
        run(&mut c);
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {:<26} {verdict} ({:.1}s)",
            i + 1,
            name,
            start.elapsed().as_secs_f64()
        );
        for check in &c.checks {
            println!("    [{}] {}", if check.ok { "ok" } else { "FAIL" }, check.label);
        }
        failed += usize::from(!c.passed());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
