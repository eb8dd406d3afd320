//! Bessel, Pochhammer, beta and generalized hypergeometric functions, with
//! residual checks for the series identities the kernels rely on.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::scalar::{factorial, factorial_q, pow, Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("lower parameter {0} is a nonpositive integer")]
    PoleInLowerParameter(String),
    #[error("series diverges at z = {z} for a {p}F{q}")]
    OutsideDisk { z: f64, p: usize, q: usize },
    #[error("no convergence within {0} terms")]
    NoConvergence(usize),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

/// Default relative tolerance for float series.
pub const TOL: f64 = 1e-17;

/// Above this argument `bessel_j` switches from the power series to
/// backward recurrence.
const SERIES_LIMIT: f64 = 8.0;

/// `J_n(x) = Σ (-1)^k / (k! (n+k)!) (x/2)^{n+2k}` summed until two
/// consecutive terms fall below `tol · (1 + |sum|)`.
pub fn bessel_j_series(n: usize, x: f64, tol: f64) -> f64 {
    let half = x / 2.0;
    let mut term = (1..=n).fold(1.0, |acc, i| acc * half / i as f64);
    let mut sum = term;
    let mut small = 0;
    let q = -half * half;
    for k in 1..10_000 {
        term *= q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() < tol * (1.0 + sum.abs()) {
            small += 1;
            if small == 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
    sum
}

/// `J_n(x)`: power series for `|x| <= 8`, Miller's backward recurrence
/// normalised by `J_0 + 2 Σ J_{2k} = 1` beyond.
pub fn bessel_j(n: usize, x: f64, tol: f64) -> f64 {
    if x.abs() <= SERIES_LIMIT {
        return bessel_j_series(n, x, tol);
    }
    let value = miller(n, x.abs())[n];
    if x < 0.0 && n % 2 == 1 {
        -value
    } else {
        value
    }
}

/// `[J_0(x), …, J_{n_max}(x)]`.
pub fn bessel_j_all(n_max: usize, x: f64) -> Vec<f64> {
    if x.abs() <= SERIES_LIMIT {
        return (0..=n_max).map(|n| bessel_j_series(n, x, TOL)).collect();
    }
    let mut out = miller(n_max, x.abs());
    out.truncate(n_max + 1);
    if x < 0.0 {
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

fn miller(n_max: usize, x: f64) -> Vec<f64> {
    let top = n_max.max(x.ceil() as usize) + 30 + (40.0 * x).sqrt() as usize;
    let start = top + top % 2;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            for v in vals.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    vals.iter().take(n_max.max(1) + 1).map(|v| v / norm).collect()
}

/// Exact partial sum of the `J_n` series at rational `x` with `terms` terms.
pub fn bessel_j_exact(n: usize, x: &Rational, terms: usize) -> Rational {
    let half = x / Rational::from_integer(BigInt::from(2));
    let mut sum = Rational::zero();
    for k in 0..terms {
        let t = pow(&half, n + 2 * k) / Rational::from_integer(factorial(k) * factorial(n + k));
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
    }
    sum
}

/// `I_0(x) = Σ (x/2)^{2i} / (i!)^2`, stopped when the next term is below
/// `tol` relative to the sum.
pub fn bessel_i0(x: f64, tol: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for i in 1..10_000 {
        term *= q / (i as f64 * i as f64);
        sum += term;
        if term < tol * sum {
            break;
        }
    }
    sum
}

/// Rising factorial `(x)_k = x (x+1) … (x+k-1)`.
pub fn pochhammer<S: Scalar>(x: &S, k: usize) -> S {
    let mut acc = S::one();
    let mut cur = x.clone();
    for _ in 0..k {
        acc = acc * cur.clone();
        cur = cur + S::one();
    }
    acc
}

/// `B(m, n) = (m-1)! (n-1)! / (m+n-1)!` for positive integers.
pub fn beta_int(m: usize, n: usize) -> Rational {
    assert!(m >= 1 && n >= 1, "beta_int needs positive arguments");
    Rational::new(factorial(m - 1) * factorial(n - 1), factorial(m + n - 1))
}

/// Parameters of `pFq(a; b; z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PFQParams {
    upper: Vec<Rational>,
    lower: Vec<Rational>,
}

impl PFQParams {
    pub fn new(upper: Vec<Rational>, lower: Vec<Rational>) -> Result<Self, SpecFunError> {
        if let Some(b) = lower
            .iter()
            .find(|b| b.is_integer() && !b.is_positive())
        {
            return Err(SpecFunError::PoleInLowerParameter(b.to_string()));
        }
        Ok(Self { upper, lower })
    }

    pub fn upper(&self) -> &[Rational] {
        &self.upper
    }

    pub fn lower(&self) -> &[Rational] {
        &self.lower
    }

    /// Ratio of consecutive terms `t_{k+1} / t_k` divided by `z`.
    fn ratio_f64(&self, k: usize) -> f64 {
        let kf = k as f64;
        let num: f64 = self.upper.iter().map(|a| a.as_f64() + kf).product();
        let den: f64 = self.lower.iter().map(|b| b.as_f64() + kf).product();
        num / (den * (kf + 1.0))
    }

    fn check_disk(&self, z: f64) -> Result<(), SpecFunError> {
        let (p, q) = (self.upper.len(), self.lower.len());
        let terminates = self.upper.iter().any(|a| a.is_integer() && !a.is_positive());
        let diverges = (p == q + 1 && z.abs() >= 1.0) || (p > q + 1 && z != 0.0);
        if diverges && !terminates {
            return Err(SpecFunError::OutsideDisk { z, p, q });
        }
        Ok(())
    }

    /// `Σ (a)_k / (b)_k z^k / k!` until two consecutive terms fall below
    /// `tol` relative to the sum.
    pub fn eval(&self, z: f64, tol: f64, max_terms: usize) -> Result<f64, SpecFunError> {
        if tol <= 0.0 || tol.is_nan() {
            return Err(SpecFunError::BadTolerance(tol));
        }
        self.check_disk(z)?;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut small = 0;
        for k in 0..max_terms {
            term *= self.ratio_f64(k) * z;
            sum += term;
            if term == 0.0 {
                return Ok(sum);
            }
            if term.abs() < tol * sum.abs() {
                small += 1;
                if small == 2 {
                    return Ok(sum);
                }
            } else {
                small = 0;
            }
        }
        Err(SpecFunError::NoConvergence(max_terms))
    }

    /// The first `n` partial sums.
    pub fn partial_sums(&self, z: f64, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..n {
            out.push(sum);
            term *= self.ratio_f64(k) * z;
            sum += term;
        }
        out
    }

    /// Exact partial sum with `terms` terms at rational `z`.
    pub fn eval_exact(&self, z: &Rational, terms: usize) -> Rational {
        let mut term = Rational::one();
        let mut sum = Rational::zero();
        for k in 0..terms {
            sum += &term;
            let kq = Rational::from_integer(BigInt::from(k));
            let num = self
                .upper
                .iter()
                .fold(Rational::one(), |acc, a| acc * (a + &kq));
            let den = self
                .lower
                .iter()
                .fold(Rational::one(), |acc, b| acc * (b + &kq));
            term = term * num * z / (den * (kq + Rational::one()));
        }
        sum
    }
}

/// `pFq(a; b; z)`.
pub fn pfq(params: &PFQParams, z: f64, tol: f64, max_terms: usize) -> Result<f64, SpecFunError> {
    params.eval(z, tol, max_terms)
}

/// `Σ_{j=0}^{ℓ} (-1)^j (ℓ+j+k-1)! / ((ℓ-j)! j! (j+k)!)`, exactly.
///
/// Zero for every `ℓ > 0`; `1/k` at `ℓ = 0`.
pub fn appendix_a_inner_sum(ell: usize, k: usize) -> Rational {
    assert!(k >= 1, "k must be at least 1");
    let mut sum = Rational::zero();
    for j in 0..=ell {
        let term = Rational::new(
            factorial(ell + j + k - 1),
            factorial(ell - j) * factorial(j) * factorial(j + k),
        );
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

fn full_sum_term(i: usize, j: usize, k: usize) -> Rational {
    Rational::new(
        factorial(i + 2 * j + k - 1),
        factorial(i) * factorial(j) * factorial(j + k) * factorial(2 * i + 2 * j + k),
    )
}

/// Exact partial double sum
/// `Σ_{i+j<=terms} (-1)^j (i+2j+k-1)! / (i! j! (j+k)! (2i+2j+k)!) (Mt)^{2i+2j}`,
/// which tends to `1/(k·k!)` for every `Mt`.
pub fn appendix_a_full_sum_exact(k: usize, mt: &Rational, terms: usize) -> Rational {
    assert!(k >= 1, "k must be at least 1");
    let mt2 = mt * mt;
    let mut sum = Rational::zero();
    let mut power = Rational::one();
    for s in 0..=terms {
        let mut shell = Rational::zero();
        for j in 0..=s {
            let t = full_sum_term(s - j, j, k);
            if j % 2 == 0 {
                shell += t;
            } else {
                shell -= t;
            }
        }
        sum += shell * &power;
        power *= &mt2;
    }
    sum
}

/// Float version of [`appendix_a_full_sum_exact`] for real `mt`.
pub fn appendix_a_full_sum(k: usize, mt: f64, terms: usize) -> f64 {
    assert!(k >= 1, "k must be at least 1");
    let ln_fact: Vec<f64> = ln_factorials(2 * terms + 2 * k + 2);
    let ln_mt2 = if mt == 0.0 { f64::NEG_INFINITY } else { (mt * mt).ln() };
    let mut sum = 0.0;
    for s in 0..=terms {
        let weight = if s == 0 { 1.0 } else { (s as f64 * ln_mt2).exp() };
        if weight == 0.0 {
            continue;
        }
        let mut shell = 0.0;
        for j in 0..=s {
            let i = s - j;
            let ln = ln_fact[i + 2 * j + k - 1]
                - ln_fact[i]
                - ln_fact[j]
                - ln_fact[j + k]
                - ln_fact[2 * i + 2 * j + k];
            let t = ln.exp();
            shell += if j % 2 == 0 { t } else { -t };
        }
        sum += shell * weight;
    }
    sum
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for i in 1..=n {
        out[i] = out[i - 1] + (i as f64).ln();
    }
    out
}

/// `1 / (k · k!)`.
pub fn appendix_a_limit(k: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(k) * factorial(k))
}

/// `|J_0(λz) - Σ_{n<n_terms} ((1-λ²)z/2)^n / n! · J_n(z)|`.
pub fn check_multiplication_identity(lambda: f64, z: f64, n_terms: usize) -> f64 {
    let lhs = bessel_j(0, lambda * z, TOL);
    let q = (1.0 - lambda * lambda) * z / 2.0;
    let js = bessel_j_all(n_terms.max(1), z);
    let mut weight = 1.0;
    let mut rhs = 0.0;
    for (n, jn) in js.iter().enumerate().take(n_terms.max(1)) {
        if n > 0 {
            weight *= q / n as f64;
        }
        rhs += weight * jn;
    }
    (lhs - rhs).abs()
}

/// `|Σ_{k=1}^{n_terms} (-1)^{k+1} (2k)² J_{2k}(z) - z sin(z) / 2|`.
pub fn check_sine_neumann_identity(z: f64, n_terms: usize) -> f64 {
    let js = bessel_j_all(2 * n_terms, z);
    let sum: f64 = (1..=n_terms)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * (2.0 * k as f64).powi(2) * js[2 * k]
        })
        .sum();
    (sum - z * z.sin() / 2.0).abs()
}

/// `J_α(x)` through `0F1(; α+1; -x²/4) (x/2)^α / α!`.
pub fn bessel_j_via_0f1(alpha: usize, x: f64) -> Result<f64, SpecFunError> {
    let params = PFQParams::new(vec![], vec![Rational::from_integer(BigInt::from(alpha + 1))])?;
    let f = params.eval(-x * x / 4.0, TOL, 10_000)?;
    let scale = (x / 2.0).powi(alpha as i32) / factorial(alpha).to_f64().unwrap_or(f64::INFINITY);
    Ok(f * scale)
}

/// `(ℓ, k)` pairs for which the inner sum is nonzero, over `1..=ell_max`
/// and `1..=k_max`. Empty when the identity holds on the whole range.
pub fn appendix_a_failures(ell_max: usize, k_max: usize) -> Vec<(usize, usize)> {
    let mut bad = Vec::new();
    for ell in 1..=ell_max {
        for k in 1..=k_max {
            if !appendix_a_inner_sum(ell, k).is_zero() {
                bad.push((ell, k));
            }
        }
    }
    bad
}

/// Exact `(2n)!/n!` as a float, for the local-kernel weights.
pub fn central_factorial_ratio(n: usize) -> f64 {
    (factorial_q(2 * n) / factorial_q(n)).as_f64()
}
