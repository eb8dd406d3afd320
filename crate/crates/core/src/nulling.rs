//! Relative degree, output-nulling inputs and zero dynamics for series whose
//! forced part is maximal palindromic linear.
//!
//! Global case: `u*(t) = Σ_k (c, x0^k) u_k*(t)` with
//! `u_k*(t) = -k J_k(2Mt) / (K M^k t)`.
//!
//! Local case: `u*` is a polynomial `Σ_m u_m t^m` fixed by matching the power
//! series of `y_N + y_F` term by term. The forced response to `t^m` is
//! `g_m(t) = ∫_0^t h(t,τ) τ^m dτ`, whose coefficient of `t^{2n+m+1}` is
//! `K M^{2n} (2n)! (n+m)! / (n! (2n+m+1)!)`, so the system is lower
//! triangular with diagonal `K/(m+1)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::scalar::{factorial, pow, Rational, Scalar};
use crate::series::{Series, SeriesError};
use crate::simulate::{
    convolve_kernel, cumulative_trapezoid, Kernel, KernelKind, SampledSignal, SimulateError,
};
use crate::specfun::{bessel_j_all, PFQParams, SpecFunError, TOL};
use crate::words::{Alphabet, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NullingError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Simulate(#[from] SimulateError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("series must be over {{x0, x1}}, got {0} letters")]
    NotSiso(usize),
    #[error("growth constants must be positive (K = {k}, M = {m})")]
    NonPositiveGrowth { k: String, m: String },
    #[error("natural part has a constant term {0}; no input can null it")]
    ConstantTerm(String),
    #[error("need coefficients of y_N up to t^{needed}, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("zero pivot for u_{0}; the triangular system is inconsistent")]
    SingularDiagonal(usize),
    #[error("local basis functions need (Mt)^2 < 1, got Mt = {0}")]
    OutsideConvergence(f64),
}

/// Relative degree `r`: `r - 1` is the shortest leading `x0` run in the
/// forced support, and `x0^{r-1} x1` must itself be in that support.
pub fn relative_degree<S: Scalar>(c: &Series<S>) -> Result<Option<usize>, NullingError> {
    if c.alphabet().size() != 2 {
        return Err(NullingError::NotSiso(c.alphabet().size()));
    }
    let forced = c.forced_part();
    let Some(lead) = forced.support().map(Word::leading_drift).min() else {
        return Ok(None);
    };
    let head = Word::sandwich(lead, 0);
    let has_head = forced.support().any(|w| *w == head);
    Ok(has_head.then_some(lead + 1))
}

/// Sufficient test: the relative degree `r` exists and the natural support
/// is nonempty and inside `{x0^k : k >= r}`.
pub fn is_primely_nullable_sufficient<S: Scalar>(c: &Series<S>) -> Result<bool, NullingError> {
    let Some(r) = relative_degree(c)? else {
        return Ok(false);
    };
    let natural = c.natural_part();
    Ok(!natural.is_zero() && natural.support().all(|w| w.len() >= r))
}

/// `k ↦ (c, x0^k)` over the natural support.
pub fn natural_coefficients<S: Scalar>(c: &Series<S>) -> BTreeMap<usize, S> {
    c.natural_part()
        .terms()
        .map(|(w, v)| (w.len(), v.clone()))
        .collect()
}

/// Power-series coefficients of `y_N(t) = Σ (c, x0^k) t^k / k!`, for
/// `t^0 ..= t^degree`.
pub fn natural_output_coefficients<S: Scalar>(
    natural: &BTreeMap<usize, S>,
    degree: usize,
) -> Vec<S> {
    (0..=degree)
        .map(|k| match natural.get(&k) {
            Some(v) => v.clone() / S::from_bigint(&factorial(k)),
            None => S::zero(),
        })
        .collect()
}

fn check_growth(k: f64, m: f64) -> Result<(), NullingError> {
    if !(k > 0.0 && m > 0.0) {
        return Err(NullingError::NonPositiveGrowth {
            k: k.to_string(),
            m: m.to_string(),
        });
    }
    Ok(())
}

/// `(k/τ) J_k(2Mτ)` with its limit at `τ = 0` (`M` for `k = 1`, else 0).
pub fn bessel_ratio(k: usize, m: f64, tau: f64, js: &[f64]) -> f64 {
    if tau == 0.0 {
        return if k == 1 { m } else { 0.0 };
    }
    k as f64 / tau * js[k]
}

/// `u_k*(t) = -k J_k(2Mt) / (K M^k t)`, with `u_1*(0) = -1/K` and
/// `u_k*(0) = 0` for `k >= 2`.
pub fn nulling_basis_input(k: usize, big_k: f64, m: f64, t: f64) -> f64 {
    let js = bessel_j_all(k, 2.0 * m * t);
    -bessel_ratio(k, m, t, &js) / (big_k * m.powi(k as i32))
}

/// Samples of `u*(t) = Σ_k (c, x0^k) u_k*(t)` on `0, dt, …, t_end`.
pub fn global_nulling_input(
    natural: &BTreeMap<usize, f64>,
    k: f64,
    m: f64,
    dt: f64,
    t_end: f64,
) -> Result<SampledSignal, NullingError> {
    check_growth(k, m)?;
    if let Some(c0) = natural.get(&0).filter(|v| **v != 0.0) {
        return Err(NullingError::ConstantTerm(c0.to_string()));
    }
    let k_max = natural.keys().copied().max().unwrap_or(0);
    let grid = SampledSignal::constant(dt, t_end, 0.0)?;
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let t = grid.time(i);
            let js = bessel_j_all(k_max.max(1), 2.0 * m * t);
            natural
                .iter()
                .filter(|(&kk, _)| kk >= 1)
                .map(|(&kk, c)| -c * bessel_ratio(kk, m, t, &js) / (k * m.powi(kk as i32)))
                .sum()
        })
        .collect();
    Ok(SampledSignal::new(dt, values)?)
}

/// Natural response, forced response and their sum under an input.
#[derive(Debug, Clone, PartialEq)]
pub struct NullReport {
    pub natural: SampledSignal,
    pub forced: SampledSignal,
    pub total: SampledSignal,
    pub sup_abs: f64,
}

/// `y_N(t) = Σ (c, x0^k) t^k / k!` on the grid of `like`.
pub fn natural_response(natural: &BTreeMap<usize, f64>, like: &SampledSignal) -> SampledSignal {
    like.map(|t, _| {
        natural
            .iter()
            .map(|(&k, c)| c * t.powi(k as i32) / factorial(k).to_f64().unwrap_or(f64::INFINITY))
            .sum()
    })
}

fn report(natural: SampledSignal, forced: SampledSignal) -> Result<NullReport, NullingError> {
    let total: Vec<f64> = natural
        .values()
        .iter()
        .zip(forced.values())
        .map(|(a, b)| a + b)
        .collect();
    let sup_abs = total.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(NullReport {
        total: SampledSignal::new(natural.dt(), total)?,
        natural,
        forced,
        sup_abs,
    })
}

/// Drives the global maximal palindromic system with the nulling input and
/// reports `y = y_N + y_F` on `[0, t_end]`.
pub fn verify_null_global(
    natural: &BTreeMap<usize, f64>,
    k: f64,
    m: f64,
    t_end: f64,
    dt: f64,
) -> Result<NullReport, NullingError> {
    let u = global_nulling_input(natural, k, m, dt, t_end)?;
    let kernel = Kernel::new(KernelKind::Global, k, m)?;
    let forced = convolve_kernel(&kernel, &u, u.duration())?;
    report(natural_response(natural, &u), forced)
}

/// Same as [`verify_null_global`] with an arbitrary input.
pub fn null_report_with_input(
    natural: &BTreeMap<usize, f64>,
    kernel: &Kernel,
    u: &SampledSignal,
) -> Result<NullReport, NullingError> {
    let forced = convolve_kernel(kernel, u, u.duration())?;
    report(natural_response(natural, u), forced)
}

/// `sup_t |(Mt)^k/k! - ∫_0^t I_0(2M√((t-τ)τ)) (k/τ) J_k(2Mτ) dτ|` over
/// `[0, t_end]`.
pub fn lemma_residual(k: usize, m: f64, t_end: f64, dt: f64) -> Result<f64, NullingError> {
    check_growth(1.0, m)?;
    let grid = SampledSignal::constant(dt, t_end, 0.0)?;
    let integrand = grid.map(|t, _| bessel_ratio(k, m, t, &bessel_j_all(k, 2.0 * m * t)));
    let kernel = Kernel::new(KernelKind::Global, 1.0, m)?;
    let conv = convolve_kernel(&kernel, &integrand, grid.duration())?;
    let kf = factorial(k).to_f64().unwrap_or(f64::INFINITY);
    Ok(conv
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| ((m * grid.time(i)).powi(k as i32) / kf - v).abs())
        .fold(0.0, f64::max))
}

/// Parity of a local basis function: `f^e_j` answers `t^{2j}`, `f^o_j`
/// answers `t^{2j+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn power(self, j: usize) -> usize {
        match self {
            Parity::Even => 2 * j,
            Parity::Odd => 2 * j + 1,
        }
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Hypergeometric parameters of `g_m`: `3F2([1/2, 1, m+1]; [(m+2)/2, (m+3)/2])`,
/// collapsing to `2F1([1, 1/2]; [3/2])` at `m = 1`.
pub fn local_basis_params(power: usize) -> PFQParams {
    let m = power as i64;
    let result = if power == 1 {
        PFQParams::new(vec![q(1, 1), q(1, 2)], vec![q(3, 2)])
    } else {
        PFQParams::new(
            vec![q(1, 2), q(1, 1), q(m + 1, 1)],
            vec![q(m + 2, 2), q(m + 3, 2)],
        )
    };
    result.expect("lower parameters are positive")
}

/// `f^e_j(t)` or `f^o_j(t)`, i.e. `K pFq(…; (Mt)^2) t^{m+1}/(m+1)` with
/// `m = 2j` or `2j+1`.
pub fn local_basis_function(
    parity: Parity,
    j: usize,
    k: f64,
    m: f64,
    t: f64,
) -> Result<f64, NullingError> {
    check_growth(k, m)?;
    let mt = m * t;
    if mt * mt >= 1.0 {
        return Err(NullingError::OutsideConvergence(mt));
    }
    let power = parity.power(j);
    let f = local_basis_params(power).eval(mt * mt, TOL, 100_000)?;
    Ok(k * f * t.powi(power as i32 + 1) / (power as f64 + 1.0))
}

/// Coefficients of `t^0 ..= t^degree` in `g_power(t) = ∫_0^t h(t,τ) τ^power dτ`
/// for the local kernel.
pub fn local_basis_series<S: Scalar>(power: usize, k: &S, m: &S, degree: usize) -> Vec<S> {
    let m2 = m.clone() * m.clone();
    let mut out = vec![S::zero(); degree + 1];
    let mut n = 0;
    while 2 * n + power < degree {
        let p = 2 * n + power + 1;
        let num = factorial(2 * n) * factorial(n + power);
        let den = factorial(n) * factorial(p);
        out[p] = k.clone() * pow(&m2, n) * S::from_rational(&Rational::new(num, den));
        n += 1;
    }
    out
}

/// Polynomial nulling input `u*(t) = Σ_m coefficients[m] t^m` for the local
/// kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalNullingSolution<S = Rational> {
    pub coefficients: Vec<S>,
    /// Coefficients of `y_N + y_F` for `t^0 ..= t^{2J+1}`; zero by
    /// construction, recomputed independently of the substitution.
    pub residual: Vec<S>,
}

impl<S: Scalar> LocalNullingSolution<S> {
    pub fn eval(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c.as_f64())
    }

    /// `y_F(t) = Σ_m u_m g_m(t)` through the hypergeometric basis functions.
    pub fn forced_output(&self, k: f64, m: f64, t: f64) -> Result<f64, NullingError> {
        let mut y = 0.0;
        for (power, u) in self.coefficients.iter().enumerate() {
            let parity = if power % 2 == 0 { Parity::Even } else { Parity::Odd };
            y += u.as_f64() * local_basis_function(parity, power / 2, k, m, t)?;
        }
        Ok(y)
    }
}

/// Solves `y_N + Σ_{m<=2J} u_m g_m = 0` through `t^{2J+1}` by forward
/// substitution. `y_n[p]` is the coefficient of `t^p`.
pub fn local_nulling_solve<S: Scalar>(
    y_n: &[S],
    k: &S,
    m: &S,
    j_trunc: usize,
) -> Result<LocalNullingSolution<S>, NullingError> {
    if *k <= S::zero() || *m <= S::zero() {
        return Err(NullingError::NonPositiveGrowth {
            k: k.to_string(),
            m: m.to_string(),
        });
    }
    let degree = 2 * j_trunc + 1;
    if y_n.len() < degree + 1 {
        return Err(NullingError::SeriesTooShort {
            needed: degree,
            got: y_n.len().saturating_sub(1),
        });
    }
    if !y_n[0].is_zero() {
        return Err(NullingError::ConstantTerm(y_n[0].to_string()));
    }
    let basis: Vec<Vec<S>> = (0..degree)
        .map(|p| local_basis_series(p, k, m, degree))
        .collect();
    let mut u: Vec<S> = Vec::with_capacity(degree);
    for (col, g) in basis.iter().enumerate() {
        let row = col + 1;
        let pivot = g[row].clone();
        if pivot.is_zero() {
            return Err(NullingError::SingularDiagonal(col));
        }
        let known = u
            .iter()
            .zip(&basis)
            .fold(y_n[row].clone(), |acc, (ui, gi)| acc + ui.clone() * gi[row].clone());
        u.push(-known / pivot);
    }
    let residual = (0..=degree)
        .map(|p| {
            basis
                .iter()
                .zip(&u)
                .fold(y_n[p].clone(), |acc, (g, ui)| acc + ui.clone() * g[p].clone())
        })
        .collect();
    Ok(LocalNullingSolution {
        coefficients: u,
        residual,
    })
}

/// `c_N = Σ_{k>=1} M^{2k-1} (2k-2)! x0^{2k-1}` to degree `deg`, whose
/// natural response is `atanh(Mt)`.
pub fn arctanh_natural_series(m: &Rational, deg: usize) -> Series<Rational> {
    let mut c = Series::zero(Alphabet::siso(), deg);
    let mut k = 1;
    while 2 * k - 1 <= deg {
        let coeff = pow(m, 2 * k - 1) * Rational::from_integer(factorial(2 * k - 2));
        c.insert(Word::power(0, 2 * k - 1), coeff);
        k += 1;
    }
    c
}

/// Taylor coefficients of `e^t sin(2πt)`: `Im((1 + 2πi)^p) / p!`.
pub fn exp_sin_coefficients(degree: usize) -> Vec<f64> {
    let w = 2.0 * std::f64::consts::PI;
    let (mut re, mut im) = (1.0f64, 0.0f64);
    let mut out = Vec::with_capacity(degree + 1);
    for p in 0..=degree {
        if p > 0 {
            let nre = (re - w * im) / p as f64;
            let nim = (im + w * re) / p as f64;
            re = nre;
            im = nim;
        }
        out.push(im);
    }
    out
}

/// Zero-dynamics trajectories `z_n`, `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroDynamics {
    states: Vec<SampledSignal>,
}

impl ZeroDynamics {
    /// `z_n`, `1 <= n <= n_max`.
    pub fn state(&self, n: usize) -> &SampledSignal {
        &self.states[n - 1]
    }

    pub fn n_max(&self) -> usize {
        self.states.len()
    }

    /// `t,z1,…,zn` CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for n in 1..=self.states.len() {
            out.push_str(&format!(",z{n}"));
        }
        out.push('\n');
        let Some(first) = self.states.first() else {
            return out;
        };
        for i in 0..first.len() {
            out.push_str(&first.time(i).to_string());
            for z in &self.states {
                out.push_str(&format!(",{}", z.values()[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Integrates `ż_n = J_n(2Mt) u*(t)`, `z_n(0) = (c, x0^n)/n!`, by the
/// trapezoid rule on the grid of `u_star`.
pub fn zero_dynamics(
    u_star: &SampledSignal,
    natural: &BTreeMap<usize, f64>,
    m: f64,
    n_max: usize,
) -> Result<ZeroDynamics, NullingError> {
    check_growth(1.0, m)?;
    let dt = u_star.dt();
    let bessel: Vec<Vec<f64>> = (0..u_star.len())
        .into_par_iter()
        .map(|i| bessel_j_all(n_max.max(1), 2.0 * m * u_star.time(i)))
        .collect();
    let states = (1..=n_max)
        .map(|n| {
            let z0 = natural.get(&n).copied().unwrap_or(0.0)
                / factorial(n).to_f64().unwrap_or(f64::INFINITY);
            let f: Vec<f64> = bessel
                .iter()
                .zip(u_star.values())
                .map(|(js, u)| js[n] * u)
                .collect();
            let z = cumulative_trapezoid(&f, dt).into_iter().map(|v| z0 + v).collect();
            SampledSignal::new(dt, z)
        })
        .collect::<Result<_, _>>()?;
    Ok(ZeroDynamics { states })
}

/// `z_n(t)` for the arctanh example (`u* = -M/K`):
/// `M^n/n [n odd] - (1/K) 1F2([1/2+n/2]; [3/2+n/2, 1+n]; -(Mt)^2) (Mt)^{n+1}/(n+1)!`.
pub fn arctanh_zero_dynamics(n: usize, k: f64, m: f64, t: f64) -> Result<f64, NullingError> {
    check_growth(k, m)?;
    let nn = n as i64;
    let params = PFQParams::new(vec![q(nn + 1, 2)], vec![q(nn + 3, 2), q(nn + 1, 1)])?;
    let mt = m * t;
    let f = params.eval(-mt * mt, TOL, 10_000)?;
    let initial = if n % 2 == 1 { m.powi(nn as i32) / n as f64 } else { 0.0 };
    let fact = factorial(n + 1).to_f64().unwrap_or(f64::INFINITY);
    Ok(initial - f * mt.powi(nn as i32 + 1) / fact / k)
}
