//! Reduced words in a free group of finite rank and the geometry of its
//! left-Cayley graph.
//!
//! # Orientation
//!
//! Configurations live on the *left*-Cayley graph: the neighbours of `g` are
//! `s g` for letters `s`. The shift acts by `(g·x)_f = x_{fg}`, so right
//! multiplication moves configurations and left multiplication walks the
//! tree.
//!
//! A [`Word`] stores its letters **leftmost letter first**. The parent of a
//! non-identity word (the next vertex on the geodesic towards `e`) is obtained
//! by dropping the *leftmost* letter, and `past(s)` is the set of words whose
//! *rightmost* letter is `s`. This is the reverse of the usual right-Cayley
//! habit where one pops the last letter to walk towards the root.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use crate::error::Error;

/// Upper bound on the number of elements [`ball`] will materialise.
pub const BALL_BUDGET: u128 = 1 << 22;

/// A generator `s_i` or its inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    generator: u32,
    inverted: bool,
}

impl Letter {
    /// The generator `s_{i+1}` (zero-based index `i`).
    pub fn gen(generator: usize) -> Self {
        Letter {
            generator: generator as u32,
            inverted: false,
        }
    }

    /// The inverse generator `s_{i+1}^{-1}`.
    pub fn inv(generator: usize) -> Self {
        Letter {
            generator: generator as u32,
            inverted: true,
        }
    }

    pub fn with_sign(generator: usize, sign: i8) -> Self {
        if sign < 0 {
            Letter::inv(generator)
        } else {
            Letter::gen(generator)
        }
    }

    pub fn generator(self) -> usize {
        self.generator as usize
    }

    pub fn is_inverse(self) -> bool {
        self.inverted
    }

    pub fn sign(self) -> i8 {
        if self.inverted {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Letter {
            generator: self.generator,
            inverted: !self.inverted,
        }
    }

    /// All `2r` letters of a rank-`r` group, in the order `s1, s1^-1, s2, ...`.
    pub fn all(rank: usize) -> impl Iterator<Item = Letter> {
        (0..rank).flat_map(|i| [Letter::gen(i), Letter::inv(i)])
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "s{}^-1", self.generator + 1)
        } else {
            write!(f, "s{}", self.generator + 1)
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(token: &str) -> Result<Self, Error> {
        let bad = |why: &str| Error::ParseWord(token.to_string(), why.to_string());
        let body = token.strip_prefix('s').ok_or_else(|| bad("letters look like s1 or s1^-1"))?;
        let (digits, inverted) = match body.strip_suffix("^-1") {
            Some(d) => (d, true),
            None => (body, false),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return Err(bad("generator index must be a positive integer without leading zeros"));
        }
        let index: u32 = digits.parse().map_err(|_| bad("generator index out of range"))?;
        Ok(Letter {
            generator: index - 1,
            inverted,
        })
    }
}

/// A reduced word, leftmost letter first.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// `l^k` for a letter `l`; negative `k` gives powers of the inverse.
    pub fn power(l: Letter, k: i64) -> Self {
        let l = if k < 0 { l.inverse() } else { l };
        Word(vec![l; k.unsigned_abs() as usize])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// Word length `|g|`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
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

    pub fn multiply(&self, other: &Word) -> Word {
        let mut cancel = 0;
        while cancel < self.0.len()
            && cancel < other.0.len()
            && self.0[self.0.len() - 1 - cancel] == other.0[cancel].inverse()
        {
            cancel += 1;
        }
        let mut out = Vec::with_capacity(self.0.len() + other.0.len() - 2 * cancel);
        out.extend_from_slice(&self.0[..self.0.len() - cancel]);
        out.extend_from_slice(&other.0[cancel..]);
        Word(out)
    }

    /// `l · self`, one step along the left-Cayley graph.
    pub fn left_mul(&self, l: Letter) -> Word {
        if self.0.first() == Some(&l.inverse()) {
            Word(self.0[1..].to_vec())
        } else {
            let mut out = Vec::with_capacity(self.0.len() + 1);
            out.push(l);
            out.extend_from_slice(&self.0);
            Word(out)
        }
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// `σ(g)`: the neighbour of `g` one step closer to `e`, i.e. `g` without
    /// its leftmost letter. `None` for the identity.
    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word(self.0[1..].to_vec()))
        }
    }

    /// Membership in `past(s)`: the rightmost letter of `g` is `s`.
    pub fn in_past(&self, s: Letter) -> bool {
        self.0.last() == Some(&s)
    }

    /// Suffixes of `g` from `e` up to `g` itself: the geodesic from the
    /// identity in the left-Cayley graph.
    pub fn geodesic(&self) -> impl Iterator<Item = Word> + '_ {
        (0..=self.0.len()).rev().map(move |k| Word(self.0[k..].to_vec()))
    }

    /// Largest generator index mentioned, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator()).max()
    }

    /// Exponent sum of generator `t`, the homomorphism onto `Z` that kills
    /// every other generator.
    pub fn exponent_sum(&self, t: usize) -> i64 {
        self.0
            .iter()
            .filter(|l| l.generator() == t)
            .map(|l| l.sign() as i64)
            .sum()
    }
}

impl Ord for Word {
    /// Shortlex: shorter words first, then lexicographic on letters.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mul for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        self.multiply(rhs)
    }
}

impl From<Letter> for Word {
    fn from(l: Letter) -> Self {
        Word::letter(l)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses `e` or dot-joined letters such as `s2.s1^-1`. Input must
    /// already be reduced so that printing gives back the same string.
    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "e" {
            return Ok(Word::identity());
        }
        let letters = s.split('.').map(Letter::from_str).collect::<Result<Vec<_>, _>>()?;
        if letters.windows(2).any(|p| p[0] == p[1].inverse()) {
            return Err(Error::ParseWord(s.to_string(), "word is not reduced".into()));
        }
        Ok(Word(letters))
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Number of reduced words of length at most `radius` in rank `rank`.
pub fn ball_size(rank: usize, radius: usize) -> u128 {
    let mut total: u128 = 1;
    let mut sphere: u128 = 2 * rank as u128;
    for _ in 0..radius {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul(2 * rank as u128 - 1);
    }
    total
}

/// A finite left-connected set containing the identity, kept in shortlex
/// order so that every parent precedes its children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeftConnectedSet {
    elements: Vec<Word>,
    index: HashSet<Word>,
}

impl LeftConnectedSet {
    pub fn new<I: IntoIterator<Item = Word>>(words: I) -> Result<Self, Error> {
        let mut elements: Vec<Word> = words.into_iter().collect();
        elements.sort();
        elements.dedup();
        let index: HashSet<Word> = elements.iter().cloned().collect();
        if !index.contains(&Word::identity()) {
            return Err(Error::NotLeftConnected("domain does not contain e".into()));
        }
        // Containing e, connectivity in a tree is closure under parents.
        if let Some(orphan) = elements
            .iter()
            .find(|g| g.parent().is_some_and(|p| !index.contains(&p)))
        {
            return Err(Error::NotLeftConnected(format!("{orphan} is cut off from e")));
        }
        Ok(LeftConnectedSet { elements, index })
    }

    pub fn contains(&self, g: &Word) -> bool {
        self.index.contains(g)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Word> {
        self.elements.iter()
    }

    pub fn elements(&self) -> &[Word] {
        &self.elements
    }

    /// `D h^{-1}`, which is again left-connected; it contains `e` iff `h ∈ D`.
    pub fn translate(&self, h: &Word) -> Result<Self, Error> {
        let h_inv = h.inverse();
        LeftConnectedSet::new(self.elements.iter().map(|d| d * &h_inv))
    }
}

impl<'a> IntoIterator for &'a LeftConnectedSet {
    type Item = &'a Word;
    type IntoIter = std::slice::Iter<'a, Word>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

/// All reduced words of length at most `radius` over `rank` generators.
pub fn ball(rank: usize, radius: usize) -> Result<LeftConnectedSet, Error> {
    let size = ball_size(rank, radius);
    if size > BALL_BUDGET {
        return Err(Error::BallBudget {
            radius,
            size,
            budget: BALL_BUDGET,
        });
    }
    let mut elements = vec![Word::identity()];
    let mut frontier = vec![Word::identity()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for g in &frontier {
            for l in Letter::all(rank) {
                if g.first() != Some(l.inverse()) {
                    next.push(g.left_mul(l));
                }
            }
        }
        elements.extend(next.iter().cloned());
        frontier = next;
    }
    LeftConnectedSet::new(elements)
}

/// Whether `words` induce a connected subgraph of the left-Cayley graph.
/// The identity is not required.
pub fn is_left_connected(words: &[Word]) -> bool {
    let set: HashSet<&Word> = words.iter().collect();
    let Some(start) = words.first() else {
        return true;
    };
    let mut seen: HashSet<Word> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    let rank = words.iter().filter_map(Word::max_generator).max().map_or(0, |m| m + 1);
    while let Some(g) = queue.pop_front() {
        for l in Letter::all(rank) {
            let h = g.left_mul(l);
            if set.contains(&h) && seen.insert(h.clone()) {
                queue.push_back(h);
            }
        }
    }
    seen.len() == set.len()
}
