//! Truncated noncommutative formal power series.
//!
//! A [`Series`] stores the nonzero coefficients of every word up to its
//! truncation degree. Words longer than that are *unknown*, not zero, and
//! querying them is an error.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::scalar::{factorial, parse_rational, pow, Rational, Scalar};
use crate::words::{Alphabet, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("word {word} has length {len} beyond truncation degree {trunc}")]
    BeyondTruncation { word: String, len: usize, trunc: usize },
    #[error("alphabets differ: {0} vs {1} letters")]
    AlphabetMismatch(usize, usize),
    #[error("requested degree {requested} but operands only determine coefficients up to {available}")]
    DegreeUnavailable { requested: usize, available: usize },
    #[error("growth constants must be positive (K = {k}, M = {m})")]
    NonPositiveGrowth { k: String, m: String },
    #[error("palindromic linear series need the letters x0 and x1")]
    NeedsSiso,
    #[error("improper algebraic system: {0}")]
    ImproperSystem(String),
    #[error("fixed-point iteration did not stabilise within {0} iterations")]
    NoFixedPoint(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A truncated formal power series over `alphabet`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<S = Rational> {
    coeffs: BTreeMap<Word, S>,
    trunc: usize,
    alphabet: Alphabet,
}

/// Result of [`Series::palindrome_class`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PalindromeClass {
    pub palindromic: bool,
    pub even: bool,
    pub odd: bool,
}

/// Maximal growth patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaximalKind {
    /// `(c, η) = K M^{|η|} |η|!` on every word.
    Local,
    /// `(c, η) = K M^{|η|}` on every word.
    Global,
    /// `K M^{2n} (2n)!` on `x0^n x1 x0^n`.
    PalindromicLocal,
    /// `K M^{2n}` on `x0^n x1 x0^n`.
    PalindromicGlobal,
}

impl<S: Scalar> Series<S> {
    pub fn zero(alphabet: Alphabet, trunc: usize) -> Self {
        Self {
            coeffs: BTreeMap::new(),
            trunc,
            alphabet,
        }
    }

    /// `value · ∅`.
    pub fn constant(alphabet: Alphabet, trunc: usize, value: S) -> Self {
        let mut s = Self::zero(alphabet, trunc);
        s.insert(Word::empty(), value);
        s
    }

    /// Builds a series from `(word, coefficient)` pairs; repeated words add.
    pub fn from_terms<I>(alphabet: Alphabet, trunc: usize, terms: I) -> Result<Self, SeriesError>
    where
        I: IntoIterator<Item = (Word, S)>,
    {
        let mut s = Self::zero(alphabet, trunc);
        for (word, value) in terms {
            s.check_word(&word)?;
            s.add_to(word, value);
        }
        Ok(s)
    }

    /// The LTI series `Σ h_n x0^n x1`, truncated at `h.len()`.
    pub fn linear_time_invariant(h: &[S]) -> Self {
        let mut s = Self::zero(Alphabet::siso(), h.len());
        for (n, hn) in h.iter().enumerate() {
            s.insert(Word::sandwich(n, 0), hn.clone());
        }
        s
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn trunc_degree(&self) -> usize {
        self.trunc
    }

    /// Nonzero `(word, coefficient)` pairs in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &S)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Word> {
        self.coeffs.keys()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_proper(&self) -> bool {
        !self.coeffs.contains_key(&Word::empty())
    }

    /// Length of the shortest support word; `None` for the zero series.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.keys().next().map(Word::len)
    }

    /// `(c, w)`. Fails beyond the truncation degree.
    pub fn coefficient(&self, word: &Word) -> Result<S, SeriesError> {
        self.check_word(word)?;
        Ok(self.coeffs.get(word).cloned().unwrap_or_else(S::zero))
    }

    /// Sets `(c, w) = value`, silently dropping zeros. Caller guarantees the
    /// word is admissible.
    pub fn insert(&mut self, word: Word, value: S) {
        debug_assert!(word.len() <= self.trunc);
        if value.is_zero() {
            self.coeffs.remove(&word);
        } else {
            self.coeffs.insert(word, value);
        }
    }

    fn add_to(&mut self, word: Word, value: S) {
        let sum = match self.coeffs.remove(&word) {
            Some(old) => old + value,
            None => value,
        };
        if !sum.is_zero() {
            self.coeffs.insert(word, sum);
        }
    }

    fn check_word(&self, word: &Word) -> Result<(), SeriesError> {
        self.alphabet.check(word)?;
        if word.len() > self.trunc {
            return Err(SeriesError::BeyondTruncation {
                word: word.to_string(),
                len: word.len(),
                trunc: self.trunc,
            });
        }
        Ok(())
    }

    fn same_alphabet(&self, other: &Self) -> Result<(), SeriesError> {
        if self.alphabet != other.alphabet {
            return Err(SeriesError::AlphabetMismatch(
                self.alphabet.size(),
                other.alphabet.size(),
            ));
        }
        Ok(())
    }

    /// Drops every coefficient above `deg`.
    pub fn truncate(&self, deg: usize) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| w.len() <= deg)
                .map(|(w, v)| (w.clone(), v.clone()))
                .collect(),
            trunc: self.trunc.min(deg),
            alphabet: self.alphabet,
        }
    }

    pub fn scale(&self, factor: &S) -> Self {
        let mut out = Self::zero(self.alphabet, self.trunc);
        for (w, v) in &self.coeffs {
            out.insert(w.clone(), v.clone() * factor.clone());
        }
        out
    }

    /// `self + other`, valid to the smaller truncation degree.
    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.same_alphabet(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut out = self.truncate(trunc);
        for (w, v) in other.coeffs.iter().filter(|(w, _)| w.len() <= trunc) {
            out.add_to(w.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.scale(&-S::one()))
    }

    /// Converts coefficients to another field.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Series<T> {
        let mut out = Series::zero(self.alphabet, self.trunc);
        for (w, v) in &self.coeffs {
            out.insert(w.clone(), f(v));
        }
        out
    }

    pub fn to_f64(&self) -> Series<f64> {
        self.map_scalar(Scalar::as_f64)
    }

    /// `c̃ = Σ (c, η) η̃`.
    pub fn reverse(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|(w, v)| (w.reverse(), v.clone()))
                .collect(),
            trunc: self.trunc,
            alphabet: self.alphabet,
        }
    }

    /// `(c, η) = (c, η̃)` for every word up to the truncation degree.
    pub fn is_coefficient_reversible(&self) -> bool {
        self.coeffs.iter().all(|(w, v)| match self.coeffs.get(&w.reverse()) {
            Some(r) => r.same_as(v),
            None => false,
        })
    }

    pub fn palindrome_class(&self) -> PalindromeClass {
        let palindromic = self.coeffs.keys().all(Word::is_palindrome);
        PalindromeClass {
            palindromic,
            even: palindromic && self.coeffs.keys().all(|w| w.len() % 2 == 0),
            odd: palindromic && self.coeffs.keys().all(|w| w.len() % 2 == 1),
        }
    }

    pub fn is_palindromic(&self) -> bool {
        self.palindrome_class().palindromic
    }

    /// Coefficients are constant on every letter-count class up to the
    /// truncation degree. A class with any stored word must therefore be
    /// stored in full.
    pub fn is_exchangeable(&self) -> bool {
        let mut classes: HashMap<Vec<usize>, (usize, &S)> = HashMap::new();
        for (w, v) in &self.coeffs {
            let key = self.alphabet.letter_counts(w);
            match classes.get_mut(&key) {
                Some((seen, first)) => {
                    if !first.same_as(v) {
                        return false;
                    }
                    *seen += 1;
                }
                None => {
                    classes.insert(key, (1, v));
                }
            }
        }
        classes
            .iter()
            .all(|(counts, (seen, _))| BigInt::from(*seen) == multinomial(counts))
    }

    /// Every nonempty support word is a single-letter power `x_i^j`.
    pub fn is_palindromic_and_exchangeable_form(&self) -> bool {
        self.coeffs.keys().all(|w| match w.letters().first() {
            None => true,
            Some(&first) => w.letters().iter().all(|&l| l == first),
        })
    }

    /// `x0`-only part `c_N = Σ (c, x0^k) x0^k`.
    pub fn natural_part(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| w.is_drift_only())
                .map(|(w, v)| (w.clone(), v.clone()))
                .collect(),
            trunc: self.trunc,
            alphabet: self.alphabet,
        }
    }

    /// `c_F = c - c_N`.
    pub fn forced_part(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| !w.is_drift_only())
                .map(|(w, v)| (w.clone(), v.clone()))
                .collect(),
            trunc: self.trunc,
            alphabet: self.alphabet,
        }
    }

    /// Maximal series with growth constants `k`, `m`, populated to `deg`.
    pub fn maximal(
        kind: MaximalKind,
        alphabet: Alphabet,
        k: &S,
        m: &S,
        deg: usize,
    ) -> Result<Self, SeriesError> {
        if *k <= S::zero() || *m <= S::zero() {
            return Err(SeriesError::NonPositiveGrowth {
                k: k.to_string(),
                m: m.to_string(),
            });
        }
        let mut s = Self::zero(alphabet, deg);
        match kind {
            MaximalKind::Local | MaximalKind::Global => {
                for len in 0..=deg {
                    let mut value = k.clone() * pow(m, len);
                    if kind == MaximalKind::Local {
                        value = value * S::from_bigint(&factorial(len));
                    }
                    for w in alphabet.words_of_length(len) {
                        s.insert(w, value.clone());
                    }
                }
            }
            MaximalKind::PalindromicLocal | MaximalKind::PalindromicGlobal => {
                if alphabet.size() < 2 {
                    return Err(SeriesError::NeedsSiso);
                }
                let m2 = m.clone() * m.clone();
                for n in 0..=deg.saturating_sub(1) / 2 {
                    if 2 * n + 1 > deg {
                        break;
                    }
                    let mut value = k.clone() * pow(&m2, n);
                    if kind == MaximalKind::PalindromicLocal {
                        value = value * S::from_bigint(&factorial(2 * n));
                    }
                    s.insert(Word::sandwich(n, n), value);
                }
            }
        }
        Ok(s)
    }

    /// `Σ (c, η) left·η·right`.
    pub fn cat_sandwich(&self, left: &Word, right: &Word) -> Result<Self, SeriesError> {
        self.alphabet.check(left)?;
        self.alphabet.check(right)?;
        let mut out = Self::zero(self.alphabet, self.trunc + left.len() + right.len());
        for (w, v) in &self.coeffs {
            out.insert(left.concat(w).concat(right), v.clone());
        }
        Ok(out)
    }

    /// Highest degree at which a product of `self` and `other` is fully
    /// determined by the stored coefficients.
    fn product_degree(&self, other: &Self) -> usize {
        match (self.order(), other.order()) {
            (None, _) | (_, None) => usize::MAX,
            (Some(a), Some(b)) => (self.trunc + b).min(other.trunc + a),
        }
    }

    /// Concatenation (Cauchy) product truncated at `deg`.
    pub fn concat(&self, other: &Self, deg: usize) -> Result<Self, SeriesError> {
        self.same_alphabet(other)?;
        let available = self.product_degree(other);
        if deg > available {
            return Err(SeriesError::DegreeUnavailable {
                requested: deg,
                available,
            });
        }
        Ok(concat_unchecked(self, other, deg))
    }

    /// Shuffle product truncated at `deg`.
    pub fn shuffle(&self, other: &Self, deg: usize) -> Result<Self, SeriesError> {
        self.same_alphabet(other)?;
        let available = self.product_degree(other);
        if deg > available {
            return Err(SeriesError::DegreeUnavailable {
                requested: deg,
                available,
            });
        }
        let mut cache = ShuffleCache::default();
        let mut out = Self::zero(self.alphabet, deg);
        for (u, cu) in &self.coeffs {
            for (v, dv) in &other.coeffs {
                if u.len() + v.len() > deg {
                    continue;
                }
                let weight = cu.clone() * dv.clone();
                for (w, mult) in cache.shuffle(u, v).iter() {
                    out.add_to(w.clone(), weight.clone() * S::from_bigint(mult));
                }
            }
        }
        Ok(out)
    }

    /// Writes the line-oriented text format: `<coeff> <word>` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# alphabet size {}, truncation degree {}",
            self.alphabet.size(),
            self.trunc
        );
        for (w, v) in &self.coeffs {
            let _ = writeln!(out, "{v} {w}");
        }
        out
    }
}

impl<S: Scalar + ParseCoefficient> Series<S> {
    /// Parses the text format. The alphabet is the smallest containing every
    /// letter used (at least `{x0, x1}`); the truncation degree defaults to
    /// the longest word. Words beyond an explicit `trunc` are dropped with a
    /// warning.
    pub fn parse_text(text: &str, trunc: Option<usize>) -> Result<ParsedSeries<S>, SeriesError> {
        let mut entries: Vec<(Word, S)> = Vec::new();
        let mut seen: HashMap<Word, usize> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(coeff), Some(word), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(SeriesError::Parse {
                    line: line_no,
                    message: format!("expected `<coeff> <word>`, got {line:?}"),
                });
            };
            let value = S::parse_coefficient(coeff).ok_or_else(|| SeriesError::Parse {
                line: line_no,
                message: format!("bad coefficient {coeff:?}"),
            })?;
            let word: Word = word.parse().map_err(|e: WordError| SeriesError::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            if let Some(first) = seen.insert(word.clone(), line_no) {
                return Err(SeriesError::Parse {
                    line: line_no,
                    message: format!("duplicate word {word} (first on line {first})"),
                });
            }
            entries.push((word, value));
        }
        let size = entries
            .iter()
            .filter_map(|(w, _)| w.max_letter())
            .max()
            .map_or(2, |l| (l as usize + 1).max(2));
        let longest = entries.iter().map(|(w, _)| w.len()).max().unwrap_or(0);
        let trunc = trunc.unwrap_or(longest);
        let mut warnings = Vec::new();
        let mut series = Series::zero(Alphabet::new(size)?, trunc);
        for (w, v) in entries {
            if w.len() > trunc {
                warnings.push(format!(
                    "dropping {w}: length {} exceeds truncation degree {trunc}",
                    w.len()
                ));
                continue;
            }
            series.insert(w, v);
        }
        Ok(ParsedSeries { series, warnings })
    }
}

/// A parsed series plus any truncation warnings.
#[derive(Debug, Clone)]
pub struct ParsedSeries<S> {
    pub series: Series<S>,
    pub warnings: Vec<String>,
}

/// Coefficient syntax accepted by [`Series::parse_text`].
pub trait ParseCoefficient: Sized {
    fn parse_coefficient(text: &str) -> Option<Self>;
}

impl ParseCoefficient for Rational {
    fn parse_coefficient(text: &str) -> Option<Self> {
        parse_rational(text)
    }
}

impl ParseCoefficient for f64 {
    fn parse_coefficient(text: &str) -> Option<Self> {
        match text.split_once('/') {
            Some((p, q)) => Some(p.trim().parse::<f64>().ok()? / q.trim().parse::<f64>().ok()?),
            None => text.trim().parse().ok(),
        }
    }
}

fn multinomial(counts: &[usize]) -> BigInt {
    let total: usize = counts.iter().sum();
    counts
        .iter()
        .fold(factorial(total), |acc, &c| acc / factorial(c))
}

fn concat_unchecked<S: Scalar>(a: &Series<S>, b: &Series<S>, deg: usize) -> Series<S> {
    let mut out = Series::zero(a.alphabet, deg);
    for (u, cu) in &a.coeffs {
        if u.len() > deg {
            break;
        }
        for (v, dv) in &b.coeffs {
            if u.len() + v.len() > deg {
                break;
            }
            out.add_to(u.concat(v), cu.clone() * dv.clone());
        }
    }
    out
}

/// Memoised word shuffles `u ⧢ v` with integer multiplicities.
#[derive(Default)]
struct ShuffleCache {
    memo: HashMap<(Word, Word), BTreeMap<Word, BigInt>>,
}

impl ShuffleCache {
    // (ua) ⧢ (vb) = (u ⧢ vb)a + (ua ⧢ v)b
    fn shuffle(&mut self, u: &Word, v: &Word) -> BTreeMap<Word, BigInt> {
        if u.is_empty() {
            return BTreeMap::from([(v.clone(), BigInt::one())]);
        }
        if v.is_empty() {
            return BTreeMap::from([(u.clone(), BigInt::one())]);
        }
        let key = (u.clone(), v.clone());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let (u_head, a) = split_last(u);
        let (v_head, b) = split_last(v);
        let mut out: BTreeMap<Word, BigInt> = BTreeMap::new();
        for (w, m) in self.shuffle(&u_head, v) {
            *out.entry(w.append(a)).or_insert_with(BigInt::zero) += m;
        }
        for (w, m) in self.shuffle(u, &v_head) {
            *out.entry(w.append(b)).or_insert_with(BigInt::zero) += m;
        }
        self.memo.insert(key, out.clone());
        out
    }
}

fn split_last(w: &Word) -> (Word, u8) {
    let letters = w.letters();
    let last = letters[letters.len() - 1];
    (Word::new(letters[..letters.len() - 1].to_vec()), last)
}

/// A letter of the mixed alphabet `X ∪ Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MixedLetter {
    X(u8),
    Z(usize),
}

/// One equation `z_var = p_var` of a proper algebraic system.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicRule<S = Rational> {
    pub var: usize,
    pub terms: Vec<(S, Vec<MixedLetter>)>,
}

impl<S: Scalar> AlgebraicRule<S> {
    pub fn new(var: usize, terms: Vec<(S, Vec<MixedLetter>)>) -> Self {
        Self { var, terms }
    }
}

/// Strong solution of a proper algebraic system, computed by substitution
/// from the zero series until every coefficient up to `deg` is stable.
///
/// `rules[i]` must define `z_i`.
pub fn solve_algebraic_fixed_point<S: Scalar>(
    rules: &[AlgebraicRule<S>],
    alphabet: Alphabet,
    deg: usize,
) -> Result<Vec<Series<S>>, SeriesError> {
    let n = rules.len();
    for (i, rule) in rules.iter().enumerate() {
        if rule.var != i {
            return Err(SeriesError::ImproperSystem(format!(
                "rule {i} defines z{} (rules must be listed as z0, z1, …)",
                rule.var
            )));
        }
        for (coeff, letters) in &rule.terms {
            if coeff.is_zero() {
                continue;
            }
            match letters.as_slice() {
                [] => {
                    return Err(SeriesError::ImproperSystem(format!(
                        "z{i} has a constant term"
                    )))
                }
                [MixedLetter::Z(j)] => {
                    return Err(SeriesError::ImproperSystem(format!(
                        "z{i} has a bare z{j} term"
                    )))
                }
                _ => {}
            }
            for letter in letters {
                match *letter {
                    MixedLetter::Z(j) if j >= n => {
                        return Err(SeriesError::ImproperSystem(format!(
                            "z{i} refers to undefined z{j}"
                        )))
                    }
                    MixedLetter::X(l) if l as usize >= alphabet.size() => {
                        return Err(SeriesError::Word(WordError::LetterOutOfRange {
                            index: l as usize,
                            size: alphabet.size(),
                        }))
                    }
                    _ => {}
                }
            }
        }
    }

    let mut current: Vec<Series<S>> = vec![Series::zero(alphabet, deg); n];
    let max_iterations = deg + 2;
    for _ in 0..max_iterations {
        let next: Vec<Series<S>> = rules
            .iter()
            .map(|rule| substitute(rule, &current, alphabet, deg))
            .collect();
        if next == current {
            return Ok(current);
        }
        current = next;
    }
    Err(SeriesError::NoFixedPoint(max_iterations))
}

fn substitute<S: Scalar>(
    rule: &AlgebraicRule<S>,
    values: &[Series<S>],
    alphabet: Alphabet,
    deg: usize,
) -> Series<S> {
    let mut out = Series::zero(alphabet, deg);
    for (coeff, letters) in &rule.terms {
        let mut product = Series::constant(alphabet, deg, coeff.clone());
        for letter in letters {
            let factor = match *letter {
                MixedLetter::X(l) => Series::constant(alphabet, deg, S::one())
                    .cat_sandwich(&Word::empty(), &Word::letter(l))
                    .map(|s| s.truncate(deg))
                    .unwrap_or_else(|_| Series::zero(alphabet, deg)),
                MixedLetter::Z(j) => values[j].clone(),
            };
            product = concat_unchecked(&product, &factor, deg);
            if product.is_zero() {
                break;
            }
        }
        for (w, v) in product.coeffs {
            out.add_to(w, v);
        }
    }
    out
}

/// Exponent of `x0^n x1 x0^n` encoded in a word, if it has that shape.
pub fn palindromic_linear_index(word: &Word) -> Option<usize> {
    let n = word.leading_drift();
    (word.len() == 2 * n + 1 && *word == Word::sandwich(n, n)).then_some(n)
}

/// Helper for callers holding `usize` growth constants.
pub fn rational_from_usize(n: usize) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Coefficient magnitudes as `f64`, for reporting.
pub fn coefficient_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
