//! Words in the free group on `m` generators.
//!
//! A letter is a generator index with a sign; `g_i^+ = g_i` and
//! `g_i^- = g_i^-1`. A word `[a0, a1, ..., ak]` denotes the product
//! `a0 a1 ... ak`, so `a0` is applied last.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    pub fn as_int(self) -> i64 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn from_int(s: i64) -> Option<Sign> {
        match s {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    /// Index into `[minus, plus]` pairs.
    pub fn slot(self) -> usize {
        match self {
            Sign::Minus => 0,
            Sign::Plus => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    /// Zero-based generator index.
    pub generator: usize,
    pub sign: Sign,
}

impl Letter {
    pub fn new(generator: usize, sign: Sign) -> Self {
        Letter { generator, sign }
    }

    pub fn inverse(self) -> Letter {
        Letter {
            generator: self.generator,
            sign: self.sign.flip(),
        }
    }

    /// All `2m` letters, ordered by generator then sign.
    pub fn all(m: usize) -> Vec<Letter> {
        (0..m)
            .flat_map(|g| [Letter::new(g, Sign::Minus), Letter::new(g, Sign::Plus)])
            .collect()
    }

    /// Signed one-based label, e.g. `-2` for the inverse of the second
    /// generator.
    pub fn signed_label(self) -> i64 {
        (self.generator as i64 + 1) * self.sign.as_int()
    }

    pub fn from_signed_label(label: i64) -> Option<Letter> {
        let sign = if label > 0 { Sign::Plus } else { Sign::Minus };
        let g = label.unsigned_abs() as usize;
        (g > 0).then(|| Letter::new(g - 1, sign))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn with(&self, letter: Letter) -> Word {
        let mut w = self.clone();
        w.push(letter);
        w
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[1] != w[0].inverse())
    }

    /// Reduced, and the last letter does not cancel against the first.
    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.first(), self.last()) {
                (Some(a), Some(b)) => self.len() == 1 || b != a.inverse(),
                _ => true,
            }
    }

    /// Write a reduced word as `w c w^-1` with `c` cyclically reduced,
    /// returning `(w, c)`.
    pub fn cyclic_reduction(&self) -> (Word, Word) {
        let mut lo = 0;
        let mut hi = self.len();
        while hi - lo >= 2 && self.0[hi - 1] == self.0[lo].inverse() {
            lo += 1;
            hi -= 1;
        }
        (Word(self.0[..lo].to_vec()), Word(self.0[lo..hi].to_vec()))
    }

    pub fn signed_labels(&self) -> Vec<i64> {
        self.0.iter().map(|l| l.signed_label()).collect()
    }

    pub fn from_signed_labels(labels: &[i64]) -> Option<Word> {
        labels
            .iter()
            .map(|&l| Letter::from_signed_label(l))
            .collect::<Option<Vec<_>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "id");
        }
        let parts: Vec<String> = self.0.iter().map(|l| l.signed_label().to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Every reduced word of length at most `max_len`, sorted
/// lexicographically.
pub fn reduced_words(m: usize, max_len: usize) -> Vec<Word> {
    let letters = Letter::all(m);
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                if w.last() != Some(l.inverse()) {
                    next.push(w.with(l));
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out.sort();
    out
}

/// Number of reduced words of length at most `max_len`.
pub fn reduced_word_count(m: usize, max_len: usize) -> usize {
    let mut total = 1;
    let mut layer = 2 * m;
    for _ in 0..max_len {
        total += layer;
        layer *= (2 * m).saturating_sub(1);
    }
    total
}
