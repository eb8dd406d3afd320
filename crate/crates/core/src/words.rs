//! Alphabets and words over `X = {x0, …, xm}`.
//!
//! `x0` is the drift letter: its input is identically one. Words compare
//! length-first, then lexicographically, so every map keyed by [`Word`]
//! iterates in graded-lex order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("alphabet must contain at least one letter")]
    EmptyAlphabet,
    #[error("letter index {index} out of range for alphabet of size {size}")]
    LetterOutOfRange { index: usize, size: usize },
    #[error("cannot parse word {0:?}: expected \"e\" or tokens like x0x1")]
    Parse(String),
}

/// The alphabet `{x0, …, x_{size-1}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self, WordError> {
        if size == 0 {
            return Err(WordError::EmptyAlphabet);
        }
        Ok(Self { size })
    }

    /// `{x0, x1}`: the single-input single-output alphabet.
    pub const fn siso() -> Self {
        Self { size: 2 }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, word: &Word) -> bool {
        word.letters().iter().all(|&l| (l as usize) < self.size)
    }

    pub fn check(&self, word: &Word) -> Result<(), WordError> {
        match word.letters().iter().find(|&&l| l as usize >= self.size) {
            Some(&l) => Err(WordError::LetterOutOfRange {
                index: l as usize,
                size: self.size,
            }),
            None => Ok(()),
        }
    }

    /// Number of occurrences of letter `index` in `word`.
    pub fn letter_count(&self, word: &Word, index: usize) -> Result<usize, WordError> {
        if index >= self.size {
            return Err(WordError::LetterOutOfRange {
                index,
                size: self.size,
            });
        }
        Ok(word.count(index as u8))
    }

    /// Letter-count vector `(|w|_{x0}, …, |w|_{xm})`.
    pub fn letter_counts(&self, word: &Word) -> Vec<usize> {
        let mut counts = vec![0; self.size];
        for &l in word.letters() {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Every word of length `<= deg` in graded-lex order.
    pub fn words_up_to(&self, deg: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..deg {
            let mut next = Vec::with_capacity(layer.len() * self.size);
            for w in &layer {
                for l in 0..self.size {
                    next.push(w.append(l as u8));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    /// Every word of length exactly `len`, lexicographic.
    pub fn words_of_length(&self, len: usize) -> Vec<Word> {
        let mut layer = vec![Word::empty()];
        for _ in 0..len {
            layer = layer
                .iter()
                .flat_map(|w| (0..self.size).map(move |l| w.append(l as u8)))
                .collect();
        }
        layer
    }
}

/// A finite word; letter `i` stands for `x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn letter(l: u8) -> Self {
        Word(vec![l])
    }

    /// `x_l^n`.
    pub fn power(l: u8, n: usize) -> Self {
        Word(vec![l; n])
    }

    /// `x0^left x1 x0^right`, the support words of linear SISO series.
    pub fn sandwich(left: usize, right: usize) -> Self {
        let mut letters = vec![0u8; left];
        letters.push(1);
        letters.extend(std::iter::repeat_n(0u8, right));
        Word(letters)
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reverse(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn is_palindrome(&self) -> bool {
        let n = self.0.len();
        (0..n / 2).all(|i| self.0[i] == self.0[n - 1 - i])
    }

    pub fn count(&self, letter: u8) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn append(&self, letter: u8) -> Word {
        let mut letters = self.0.clone();
        letters.push(letter);
        Word(letters)
    }

    /// Length of the leading run of `x0`.
    pub fn leading_drift(&self) -> usize {
        self.0.iter().take_while(|&&l| l == 0).count()
    }

    /// `true` when every letter is `x0` (including the empty word).
    pub fn is_drift_only(&self) -> bool {
        self.0.iter().all(|&l| l == 0)
    }

    pub fn max_letter(&self) -> Option<u8> {
        self.0.iter().copied().max()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for l in &self.0 {
            write!(f, "x{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "e" {
            return Ok(Word::empty());
        }
        let bad = || WordError::Parse(s.to_string());
        let mut letters = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            rest = rest.strip_prefix('x').ok_or_else(bad)?;
            let end = rest
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(rest.len());
            if end == 0 {
                return Err(bad());
            }
            let index: u8 = rest[..end].parse().map_err(|_| bad())?;
            letters.push(index);
            rest = &rest[end..];
        }
        if letters.is_empty() {
            return Err(bad());
        }
        Ok(Word(letters))
    }
}
