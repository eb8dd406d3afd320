#![allow(dead_code)]

use std::collections::BTreeMap;

use fliess_core::scalar::ratio;
use fliess_core::{Alphabet, Rational, Series, Word};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn q(n: i64) -> Rational {
    ratio(n, 1)
}

pub fn word(s: &str) -> Word {
    s.parse().unwrap()
}

pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let n = rng.gen_range(1..=9) * if rng.gen_bool(0.5) { 1 } else { -1 };
    ratio(n, rng.gen_range(1..=4))
}

/// Words of length `1..=deg` over `{x0, x1}`.
pub fn nonempty_words(deg: usize) -> Vec<Word> {
    Alphabet::siso().words_up_to(deg).into_iter().skip(1).collect()
}

/// Sparse series with arbitrary support.
pub fn random_series<R: Rng>(rng: &mut R, deg: usize) -> Series {
    let words = Alphabet::siso().words_up_to(deg);
    let count = rng.gen_range(0..=6);
    let terms = words
        .choose_multiple(rng, count)
        .map(|w| (w.clone(), small_rational(rng)))
        .collect::<Vec<_>>();
    Series::from_terms(Alphabet::siso(), deg, terms).unwrap()
}

pub fn random_palindromic<R: Rng>(rng: &mut R, deg: usize) -> Series {
    let pals: Vec<Word> = Alphabet::siso()
        .words_up_to(deg)
        .into_iter()
        .filter(Word::is_palindrome)
        .collect();
    let count = rng.gen_range(0..=5);
    let terms = pals
        .choose_multiple(rng, count)
        .map(|w| (w.clone(), small_rational(rng)))
        .collect::<Vec<_>>();
    Series::from_terms(Alphabet::siso(), deg, terms).unwrap()
}

/// Constant coefficient on a few whole letter-count classes.
pub fn random_exchangeable<R: Rng>(rng: &mut R, deg: usize) -> Series {
    let mut classes: BTreeMap<(usize, usize), Vec<Word>> = BTreeMap::new();
    for w in Alphabet::siso().words_up_to(deg) {
        classes.entry((w.count(0), w.count(1))).or_default().push(w);
    }
    let keys: Vec<_> = classes.keys().copied().collect();
    let count = rng.gen_range(0..=4);
    let mut terms = Vec::new();
    for key in keys.choose_multiple(rng, count) {
        let v = small_rational(rng);
        for w in &classes[key] {
            terms.push((w.clone(), v.clone()));
        }
    }
    Series::from_terms(Alphabet::siso(), deg, terms).unwrap()
}

/// Single-letter powers only, so both palindromic and exchangeable.
pub fn random_pe_form<R: Rng>(rng: &mut R, deg: usize) -> Series {
    let mut terms = Vec::new();
    if rng.gen_bool(0.5) {
        terms.push((Word::empty(), small_rational(rng)));
    }
    for _ in 0..rng.gen_range(0..=3usize.min(deg * 3)) {
        let l = rng.gen_range(0..2u8);
        let n = rng.gen_range(1..=deg);
        terms.push((Word::power(l, n), small_rational(rng)));
    }
    let mut s = Series::zero(Alphabet::siso(), deg);
    for (w, v) in terms {
        s.insert(w, v);
    }
    s
}

/// Symmetrizes random coefficients over each reversal pair.
pub fn random_reversible<R: Rng>(rng: &mut R, deg: usize) -> Series {
    let mut s = Series::zero(Alphabet::siso(), deg);
    for w in Alphabet::siso().words_up_to(deg) {
        if w.reverse() < w || !rng.gen_bool(0.4) {
            continue;
        }
        let v = small_rational(rng);
        s.insert(w.reverse(), v.clone());
        s.insert(w, v);
    }
    s
}

/// One of the generators above, chosen at random.
pub fn random_mixed<R: Rng>(rng: &mut R, deg: usize) -> Series {
    match rng.gen_range(0..5) {
        0 => random_series(rng, deg),
        1 => random_palindromic(rng, deg),
        2 => random_exchangeable(rng, deg),
        3 => random_pe_form(rng, deg),
        _ => random_reversible(rng, deg),
    }
}

/// Smooth test inputs on `[0, 1]`.
pub fn smooth_inputs() -> Vec<(&'static str, fn(f64) -> f64)> {
    vec![
        ("sin(3t)+0.5", |t| (3.0 * t).sin() + 0.5),
        ("cos(2t)", |t| (2.0 * t).cos()),
        ("1+t^2", |t| 1.0 + t * t),
        ("exp(-t)", |t| (-t).exp()),
        ("0.3+sin(5t)cos(t)", |t| 0.3 + (5.0 * t).sin() * t.cos()),
    ]
}
