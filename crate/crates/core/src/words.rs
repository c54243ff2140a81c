//! Cyclic words in the free group `<a, b>` and their image in the level-2
//! congruence subgroup.
//!
//! The letters `A` and `B` stand for `a^-1` and `b^-1`. A closed geodesic on
//! the thrice punctured sphere is an unoriented conjugacy class, so a
//! [`CyclicWord`] is stored as the lexicographically least rotation of the
//! word and of its inverse, with `a < A < b < B`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rug::{Float, Integer};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::moebius::{GroupElement, SignedMatrix};
use crate::precision::PrecisionContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    /// Exchange the generators `a` and `b`.
    pub fn swapped(self) -> Letter {
        match self {
            Letter::A => Letter::B,
            Letter::AInv => Letter::BInv,
            Letter::B => Letter::A,
            Letter::BInv => Letter::AInv,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'A' => Some(Letter::AInv),
            'b' => Some(Letter::B),
            'B' => Some(Letter::BInv),
            _ => None,
        }
    }

    pub fn matrix(self) -> SignedMatrix {
        let m = match self {
            Letter::A => SignedMatrix::new(1, 2, 0, 1),
            Letter::AInv => SignedMatrix::new(1, -2, 0, 1),
            Letter::B => SignedMatrix::new(1, 0, 2, 1),
            Letter::BInv => SignedMatrix::new(1, 0, -2, 1),
        };
        m.expect("generators are unimodular")
    }
}

pub fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    s.chars()
        .map(|c| Letter::from_char(c).ok_or_else(|| Error::InvalidWord(format!("unexpected character {c:?} in {s:?}"))))
        .collect()
}

pub fn letters_to_string(letters: &[Letter]) -> String {
    letters.iter().map(|l| l.to_char()).collect()
}

/// Cancel adjacent inverse pairs.
pub fn free_reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Free reduction of the concatenation of already reduced words.
pub fn reduced_product(parts: &[&[Letter]]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(parts.iter().map(|p| p.len()).sum());
    for part in parts {
        for &l in part.iter() {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
    }
    out
}

pub fn inverse_word(letters: &[Letter]) -> Vec<Letter> {
    letters.iter().rev().map(|l| l.inverse()).collect()
}

/// Strip matching inverse pairs from the two ends of a reduced word.
pub fn cyclic_reduce(letters: &[Letter]) -> Vec<Letter> {
    let reduced = free_reduce(letters);
    let (mut lo, mut hi) = (0, reduced.len());
    while hi - lo >= 2 && reduced[lo] == reduced[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    reduced[lo..hi].to_vec()
}

fn is_cyclically_reduced(letters: &[Letter]) -> bool {
    letters.windows(2).all(|w| w[0] != w[1].inverse())
        && (letters.len() < 2 || letters[0] != letters[letters.len() - 1].inverse())
}

/// Least rotation (Booth's algorithm).
pub fn min_rotation(letters: &[Letter]) -> Vec<Letter> {
    let n = letters.len();
    if n == 0 {
        return Vec::new();
    }
    let s: Vec<Letter> = letters.iter().chain(letters.iter()).copied().collect();
    let mut f = vec![usize::MAX; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = s[j];
        let mut i = f[j - k - 1];
        while i != usize::MAX && sj != s[k + i + 1] {
            if sj < s[k + i + 1] {
                k = j - i - 1;
            }
            i = f[i];
        }
        if i == usize::MAX && sj != s[k] {
            if sj < s[k] {
                k = j;
            }
            f[j - k] = usize::MAX;
        } else {
            f[j - k] = if i == usize::MAX { 0 } else { i + 1 };
        }
    }
    s[k..k + n].to_vec()
}

/// Smallest period `p` dividing the length with `w` equal to its rotation by `p`.
pub fn primitive_period(letters: &[Letter]) -> usize {
    let n = letters.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (0..n).all(|i| letters[i] == letters[(i + p) % n]))
        .unwrap_or(n)
}

/// A conjugacy class of the free group up to inversion, in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicWord {
    letters: Vec<Letter>,
}

impl CyclicWord {
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn period(&self) -> usize {
        primitive_period(&self.letters)
    }

    pub fn is_primitive(&self) -> bool {
        self.period() == self.len()
    }

    /// The word of the reverse orientation, as a letter sequence.
    pub fn inverse_letters(&self) -> Vec<Letter> {
        inverse_word(&self.letters)
    }

    pub fn power(&self, m: usize) -> Result<CyclicWord> {
        if m == 0 {
            return Err(Error::TrivialWord);
        }
        canonicalize(&self.letters.repeat(m))
    }

    /// Canonical form of the word with `a` and `b` exchanged.
    pub fn swapped(&self) -> CyclicWord {
        let s: Vec<Letter> = self.letters.iter().map(|l| l.swapped()).collect();
        canonicalize(&s).expect("swap preserves nontriviality")
    }

    pub fn parse(s: &str) -> Result<CyclicWord> {
        canonicalize(&parse_letters(s)?)
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&letters_to_string(&self.letters))
    }
}

impl FromStr for CyclicWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CyclicWord::parse(s)
    }
}

impl Serialize for CyclicWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Free and cyclic reduction followed by the least rotation of the word and
/// of its inverse.
pub fn canonicalize(letters: &[Letter]) -> Result<CyclicWord> {
    let reduced = cyclic_reduce(letters);
    if reduced.is_empty() {
        return Err(Error::TrivialWord);
    }
    let forward = min_rotation(&reduced);
    let backward = min_rotation(&inverse_word(&reduced));
    Ok(CyclicWord {
        letters: forward.min(backward),
    })
}

/// Like [`canonicalize`], additionally identifying a word with its image
/// under `a <-> b`.
pub fn canonicalize_up_to_swap(letters: &[Letter]) -> Result<CyclicWord> {
    let w = canonicalize(letters)?;
    let s = w.swapped();
    Ok(w.min(s))
}

pub fn signed_matrix(letters: &[Letter]) -> SignedMatrix {
    letters
        .iter()
        .fold(SignedMatrix::identity(), |acc, l| acc.mul_ref(&l.matrix()))
}

/// Matrix of a letter sequence, as an element of `PSL(2, Z)`.
pub fn evaluate_letters(letters: &[Letter]) -> GroupElement {
    signed_matrix(letters).to_element()
}

pub fn evaluate(w: &CyclicWord) -> GroupElement {
    evaluate_letters(w.letters())
}

/// Trace of the matrix product in `SL(2, Z)`; its sign is meaningful because
/// the representation lifts to `SL(2, Z)`.
pub fn signed_trace(w: &CyclicWord) -> Integer {
    signed_matrix(w.letters()).trace()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WordKind {
    Peripheral,
    Hyperbolic,
}

/// The three cusps of the thrice punctured sphere, named by a loop around them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CuspClass {
    A,
    B,
    AB,
}

impl CuspClass {
    pub const ALL: [CuspClass; 3] = [CuspClass::A, CuspClass::B, CuspClass::AB];

    /// A loop around the cusp and its inverse.
    fn loops(self) -> [Vec<Letter>; 2] {
        use Letter::*;
        match self {
            CuspClass::A => [vec![A], vec![AInv]],
            CuspClass::B => [vec![B], vec![BInv]],
            CuspClass::AB => [vec![A, BInv], vec![B, AInv]],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CuspClass::A => "a",
            CuspClass::B => "b",
            CuspClass::AB => "aB",
        }
    }
}

impl Serialize for CuspClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// A word of the form `y x^k`: a single letter followed by `k` turns around
/// the cusp of `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BackShape {
    pub cusp: CuspClass,
    pub k: u32,
}

impl fmt::Display for BackShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.cusp.name(), self.k)
    }
}

/// Detect the `y x^k` shape; cusps are tried in the order `a`, `b`, `aB`.
pub fn back_shape(w: &CyclicWord) -> Option<BackShape> {
    let n = w.len();
    for cusp in CuspClass::ALL {
        for unit in cusp.loops() {
            if !(n - 1).is_multiple_of(unit.len()) || n < 1 + unit.len() {
                continue;
            }
            let k = (n - 1) / unit.len();
            for y in Letter::ALL {
                if unit.len() == 1 && (y == unit[0] || y == unit[0].inverse()) {
                    continue;
                }
                let mut candidate = vec![y];
                for _ in 0..k {
                    candidate.extend_from_slice(&unit);
                }
                if free_reduce(&candidate).len() != candidate.len() {
                    continue;
                }
                if canonicalize(&candidate).as_ref() == Ok(w) {
                    return Some(BackShape { cusp, k: k as u32 });
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone)]
pub struct WordClassification {
    pub kind: WordKind,
    pub primitive: bool,
    pub trace: Integer,
    pub length: Option<Float>,
    pub back_shape: Option<BackShape>,
}

impl WordClassification {
    pub fn is_hyperbolic_primitive(&self) -> bool {
        self.kind == WordKind::Hyperbolic && self.primitive
    }
}

pub fn classify_word(w: &CyclicWord, ctx: &PrecisionContext) -> WordClassification {
    let trace = signed_trace(w);
    let abs = Integer::from(trace.abs_ref());
    let kind = match abs.cmp(&Integer::from(2)) {
        std::cmp::Ordering::Greater => WordKind::Hyperbolic,
        std::cmp::Ordering::Equal => WordKind::Peripheral,
        std::cmp::Ordering::Less => {
            panic!("word {w} has trace {trace}, impossible in a torsion-free group")
        }
    };
    let length = match kind {
        WordKind::Hyperbolic => Some(crate::moebius::length_from_abs_trace(&abs, ctx)),
        WordKind::Peripheral => None,
    };
    WordClassification {
        kind,
        primitive: w.is_primitive(),
        trace,
        length,
        back_shape: back_shape(w),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordFilter {
    All,
    Hyperbolic,
    HyperbolicPrimitive,
}

impl FromStr for WordFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(WordFilter::All),
            "hyperbolic" => Ok(WordFilter::Hyperbolic),
            "hyperbolic-primitive" => Ok(WordFilter::HyperbolicPrimitive),
            other => Err(Error::InvalidInput(format!("unknown filter {other:?}"))),
        }
    }
}

impl WordFilter {
    fn accepts(self, w: &CyclicWord) -> bool {
        match self {
            WordFilter::All => true,
            WordFilter::Hyperbolic => signed_trace(w).cmp_abs(&Integer::from(2)).is_gt(),
            WordFilter::HyperbolicPrimitive => {
                w.is_primitive() && signed_trace(w).cmp_abs(&Integer::from(2)).is_gt()
            }
        }
    }
}

/// Depth-first necklace generation over reduced words of one length.
///
/// `word` holds a prenecklace whose longest Lyndon prefix has length `p`.
fn necklaces_from(word: &mut Vec<Letter>, p: usize, len: usize, out: &mut Vec<CyclicWord>) {
    let t = word.len();
    if t == len {
        if !len.is_multiple_of(p) || !is_cyclically_reduced(word) {
            return;
        }
        let inv = min_rotation(&inverse_word(word));
        if *word <= inv {
            out.push(CyclicWord { letters: word.clone() });
        }
        return;
    }
    let floor = word[t - p];
    let prev = word[t - 1];
    for c in Letter::ALL {
        if c < floor || c == prev.inverse() {
            continue;
        }
        let np = if c == floor { p } else { t + 1 };
        word.push(c);
        necklaces_from(word, np, len, out);
        word.pop();
    }
}

/// Prefixes of length `min(depth, len)` that are valid prenecklace starts,
/// in lexicographic order, with their Lyndon period.
fn prefixes(len: usize, depth: usize) -> Vec<(Vec<Letter>, usize)> {
    let depth = depth.min(len).max(1);
    let mut frontier: Vec<(Vec<Letter>, usize)> = Letter::ALL.iter().map(|&l| (vec![l], 1)).collect();
    for _ in 1..depth {
        let mut next = Vec::new();
        for (w, p) in frontier {
            let t = w.len();
            for c in Letter::ALL {
                if c < w[t - p] || c == w[t - 1].inverse() {
                    continue;
                }
                let np = if c == w[t - p] { p } else { t + 1 };
                let mut v = w.clone();
                v.push(c);
                next.push((v, np));
            }
        }
        frontier = next;
    }
    frontier
}

/// Every canonical word of exactly `len` letters, in lexicographic order.
pub fn words_of_length(len: usize) -> Vec<CyclicWord> {
    if len == 0 {
        return Vec::new();
    }
    let parts: Vec<Vec<CyclicWord>> = prefixes(len, 4)
        .into_par_iter()
        .map(|(mut prefix, p)| {
            let mut out = Vec::new();
            necklaces_from(&mut prefix, p, len, &mut out);
            out
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Every canonical word with at most `max_len` letters accepted by the
/// filter, ordered by length and then lexicographically.
pub fn enumerate(max_len: usize, filter: WordFilter) -> Vec<CyclicWord> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        let words = words_of_length(len);
        let kept: Vec<CyclicWord> = words.into_par_iter().filter(|w| filter.accepts(w)).collect();
        out.extend(kept);
    }
    out
}

/// [`enumerate`], keeping one representative of each `a <-> b` orbit.
pub fn enumerate_up_to_swap(max_len: usize, filter: WordFilter) -> Vec<CyclicWord> {
    enumerate(max_len, filter)
        .into_par_iter()
        .filter(|w| *w <= w.swapped())
        .collect()
}
