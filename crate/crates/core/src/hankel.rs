//! Hankel mapping, finite Hankel blocks and rank probes.
//!
//! The Hankel block of `c` on row words `ξ` and column words `η` has entry
//! `(c, ξη)`. Ranks are computed exactly by fraction-free elimination.
//!
//! For the maximal palindromic linear series, two families of blocks have
//! rank `n + 1` at every `n`:
//!
//! - the images `H_c(p_i)` of the Lie polynomials `p_i = ad_{x0}^i(x1)`,
//!   restricted to the `x0` axis, which are polynomials of exact degree `i`;
//! - the block with rows `x0^i` and columns `x0^j x1 x0^n`, which is
//!   antidiagonal.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::scalar::{binomial, factorial, pow, Rational};
use crate::series::{MaximalKind, Series, SeriesError};
use crate::words::{Alphabet, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HankelError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("rank probes are defined for palindromic linear series only, got {0:?}")]
    UnsupportedKind(MaximalKind),
    #[error("closed form and block sum disagree for p_{i} at x0^{j}: {closed} vs {summed}")]
    RouteMismatch {
        i: usize,
        j: usize,
        closed: String,
        summed: String,
    },
}

/// `p_i = ad_{x0}^i(x1)` as an integer combination of words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdPolynomial {
    pub index: usize,
    pub expansion: BTreeMap<Word, BigInt>,
}

/// Closed form `p_i = Σ_k C(i,k) (-1)^k x0^{i-k} x1 x0^k`.
pub fn ad_polynomial(i: usize) -> AdPolynomial {
    let expansion = (0..=i)
        .map(|k| {
            let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            (Word::sandwich(i - k, k), sign * binomial(i, k))
        })
        .collect();
    AdPolynomial { index: i, expansion }
}

/// `p_i` from the recursion `p_{i+1} = x0 p_i - p_i x0`.
pub fn ad_polynomial_by_brackets(i: usize) -> AdPolynomial {
    let x0 = Word::letter(0);
    let mut current: BTreeMap<Word, BigInt> = BTreeMap::from([(Word::letter(1), BigInt::one())]);
    for _ in 0..i {
        let mut next: BTreeMap<Word, BigInt> = BTreeMap::new();
        for (w, c) in &current {
            *next.entry(x0.concat(w)).or_insert_with(BigInt::zero) += c;
            *next.entry(w.concat(&x0)).or_insert_with(BigInt::zero) -= c;
        }
        next.retain(|_, c| !c.is_zero());
        current = next;
    }
    AdPolynomial {
        index: i,
        expansion: current,
    }
}

/// A finite section of the Hankel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelBlock {
    pub rows: Vec<Word>,
    pub cols: Vec<Word>,
    pub entries: Vec<Vec<Rational>>,
}

impl HankelBlock {
    pub fn rank(&self) -> usize {
        exact_rank(&self.entries)
    }
}

/// Fills the block `(c, ξη)` for `ξ` in `rows`, `η` in `cols`.
pub fn hankel_block(
    c: &Series<Rational>,
    rows: &[Word],
    cols: &[Word],
) -> Result<HankelBlock, HankelError> {
    let entries = rows
        .par_iter()
        .map(|xi| {
            cols.iter()
                .map(|eta| c.coefficient(&xi.concat(eta)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HankelBlock {
        rows: rows.to_vec(),
        cols: cols.to_vec(),
        entries,
    })
}

/// Rank over the rationals. Rows are scaled to integers, then reduced by
/// Bareiss elimination, pivoting on the first nonzero entry of each column.
pub fn exact_rank(matrix: &[Vec<Rational>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|row| {
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter()
                .map(|q| q.numer() * (&lcm / q.denom()))
                .collect()
        })
        .collect();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev_pivot = BigInt::one();
    for col in 0..ncols {
        let Some(p) = (rank..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][col].clone();
        for r in rank + 1..nrows {
            let factor = a[r][col].clone();
            for k in col..ncols {
                let v = (&pivot * &a[r][k] - &factor * &a[rank][k]) / &prev_pivot;
                a[r][k] = v;
            }
        }
        prev_pivot = pivot;
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

fn palindromic_series(
    kind: MaximalKind,
    k: &Rational,
    m: &Rational,
    deg: usize,
) -> Result<Series<Rational>, HankelError> {
    match kind {
        MaximalKind::PalindromicGlobal | MaximalKind::PalindromicLocal => {
            Ok(Series::maximal(kind, Alphabet::siso(), k, m, deg)?)
        }
        other => Err(HankelError::UnsupportedKind(other)),
    }
}

/// `(H_c(p_i), x0^j)` for `j = 0..=j_max` from the closed form: nonzero only
/// when `i + j = 2k` and `j <= i`, where it equals `K M^{2k} C(i,k) (-1)^k`,
/// times `(2k)!` for the local series.
pub fn hankel_image_closed_form(
    kind: MaximalKind,
    k: &Rational,
    m: &Rational,
    i: usize,
    j_max: usize,
) -> Result<Vec<Rational>, HankelError> {
    let local = match kind {
        MaximalKind::PalindromicGlobal => false,
        MaximalKind::PalindromicLocal => true,
        other => return Err(HankelError::UnsupportedKind(other)),
    };
    let m2 = m * m;
    Ok((0..=j_max)
        .map(|j| {
            if j > i || (i + j) % 2 == 1 {
                return Rational::zero();
            }
            let half = (i + j) / 2;
            let mut v = k * pow(&m2, half) * Rational::from_integer(binomial(i, half));
            if local {
                v *= Rational::from_integer(factorial(2 * half));
            }
            if half % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect())
}

/// `(H_c(p_i), x0^j) = Σ_w (p_i, w) (c, x0^j w)`, summed from Hankel block
/// entries of `c`.
pub fn hankel_image_from_block(
    c: &Series<Rational>,
    i: usize,
    j_max: usize,
) -> Result<Vec<Rational>, HankelError> {
    let p = ad_polynomial(i);
    let rows: Vec<Word> = (0..=j_max).map(|j| Word::power(0, j)).collect();
    let cols: Vec<Word> = p.expansion.keys().cloned().collect();
    let weights: Vec<Rational> = p
        .expansion
        .values()
        .map(|v| Rational::from_integer(v.clone()))
        .collect();
    let block = hankel_block(c, &rows, &cols)?;
    Ok(block
        .entries
        .iter()
        .map(|row| {
            row.iter()
                .zip(&weights)
                .fold(Rational::zero(), |acc, (e, w)| acc + e * w)
        })
        .collect())
}

/// `H_c(p_i)` on the `x0` axis, computed by both routes; they must agree.
pub fn hankel_image_on_x0_axis(
    kind: MaximalKind,
    k: &Rational,
    m: &Rational,
    i: usize,
    j_max: usize,
) -> Result<Vec<Rational>, HankelError> {
    let closed = hankel_image_closed_form(kind, k, m, i, j_max)?;
    let c = palindromic_series(kind, k, m, i + j_max + 1)?;
    let summed = hankel_image_from_block(&c, i, j_max)?;
    for (j, (a, b)) in closed.iter().zip(&summed).enumerate() {
        if a != b {
            return Err(HankelError::RouteMismatch {
                i,
                j,
                closed: a.to_string(),
                summed: b.to_string(),
            });
        }
    }
    Ok(closed)
}

/// Rank of `{H_c(p_0), …, H_c(p_n)}` restricted to `x0^0 … x0^n`.
pub fn lie_rank_lower_bound(
    kind: MaximalKind,
    k: &Rational,
    m: &Rational,
    n: usize,
) -> Result<usize, HankelError> {
    let c = palindromic_series(kind, k, m, 2 * n + 1)?;
    let rows = (0..=n)
        .map(|i| hankel_image_from_block(&c, i, n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(exact_rank(&rows))
}

/// Rank of the block with rows `x0^i` and columns `x0^j x1 x0^n`,
/// `0 <= i, j <= n`.
pub fn hankel_rank_lower_bound(
    kind: MaximalKind,
    k: &Rational,
    m: &Rational,
    n: usize,
) -> Result<usize, HankelError> {
    let c = palindromic_series(kind, k, m, 3 * n + 1)?;
    let rows: Vec<Word> = (0..=n).map(|i| Word::power(0, i)).collect();
    let cols: Vec<Word> = (0..=n).map(|j| Word::sandwich(j, n)).collect();
    Ok(hankel_block(&c, &rows, &cols)?.rank())
}

/// Shortest word length at which some coefficient of `c` exceeds the
/// rational-series growth bound `K' M'^{|η|}`.
pub fn first_growth_violation(
    c: &Series<Rational>,
    k_bound: &Rational,
    m_bound: &Rational,
) -> Option<usize> {
    c.terms()
        .find(|(w, v)| v.abs() > k_bound * pow(m_bound, w.len()))
        .map(|(w, _)| w.len())
}
