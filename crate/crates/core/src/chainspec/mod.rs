//! Markov measures on `A^F` given by a stationary distribution and one
//! transition kernel per generator, evaluated exactly.
//!
//! For a generator `s`, `P_s(a, b)` is the probability that `x_s = b` given
//! `x_e = a`. Moving along an `s^{-1}`-labelled edge uses the time reversal
//! `P̂_s(a, b) = π(b) P_s(b, a) / π(a)`.

mod config;
mod enumerate;
mod json;
pub mod rational;
mod sample;

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use config::{Configuration, Missing, Shifted, Symbol, Window};
pub use enumerate::{Enumerator, DEFAULT_LEAF_BUDGET};
pub use json::{from_json, parse_spec, to_json, write_spec};
pub use rational::Rational;
pub use sample::{empirical_cylinder, sample_ball, LazySample, Sampler};

use crate::error::Error;
use crate::freegroup::Letter;
#[cfg(test)]
use crate::freegroup::Word;

/// A square matrix of exact rationals indexed by symbols.
#[derive(Clone, PartialEq, Eq)]
pub struct Kernel {
    rows: Vec<Vec<Rational>>,
}

impl Kernel {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self, Error> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSpec("kernel must be a non-empty square matrix".into()));
        }
        Ok(Kernel { rows })
    }

    /// Kernel from `(numerator, denominator)` pairs, handy in tests.
    pub fn from_ratios(rows: &[&[(i64, i64)]]) -> Result<Self, Error> {
        Kernel::new(
            rows.iter()
                .map(|r| r.iter().map(|&(p, q)| rational::ratio(p, q)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        Kernel {
            rows: (0..n)
                .map(|a| (0..n).map(|b| if a == b { Rational::one() } else { Rational::zero() }).collect())
                .collect(),
        }
    }

    /// Every row equal to `pi`.
    pub fn constant_rows(pi: &[Rational]) -> Self {
        Kernel {
            rows: vec![pi.to_vec(); pi.len()],
        }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, a: Symbol, b: Symbol) -> &Rational {
        &self.rows[a][b]
    }

    pub fn set(&mut self, a: Symbol, b: Symbol, value: Rational) {
        self.rows[a][b] = value;
    }

    pub fn row(&self, a: Symbol) -> &[Rational] {
        &self.rows[a]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn row_sum(&self, a: Symbol) -> Rational {
        self.rows[a].iter().sum()
    }

    /// `π K` as a row vector.
    pub fn left_apply(&self, pi: &[Rational]) -> Vec<Rational> {
        (0..self.size())
            .map(|b| (0..self.size()).map(|a| &pi[a] * &self.rows[a][b]).sum())
            .collect()
    }

    pub fn is_row_stochastic(&self) -> bool {
        (0..self.size()).all(|a| self.row_sum(a).is_one()) && self.rows.iter().flatten().all(|p| !p.is_negative())
    }

    pub fn is_stationary(&self, pi: &[Rational]) -> bool {
        self.left_apply(pi) == pi
    }

    /// Time reversal with respect to `pi`, which must be fully supported.
    pub fn reversed(&self, pi: &[Rational]) -> Result<Kernel, Error> {
        if pi.iter().any(|p| p.is_zero()) {
            return Err(Error::Precondition("time reversal needs a fully supported distribution".into()));
        }
        let n = self.size();
        Ok(Kernel {
            rows: (0..n)
                .map(|a| (0..n).map(|b| &pi[b] * &self.rows[b][a] / &pi[a]).collect())
                .collect(),
        })
    }
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(rational::format).collect()).collect();
        f.debug_list().entries(rows).finish()
    }
}

/// A stationary Markov chain on `A^Z`: the law of `(x_{s^n})_n` for one
/// generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZKernel {
    pub pi: Vec<Rational>,
    pub kernel: Kernel,
}

impl ZKernel {
    pub fn new(pi: Vec<Rational>, kernel: Kernel) -> Result<Self, Error> {
        if pi.len() != kernel.size() {
            return Err(Error::Mismatch("distribution and kernel sizes differ".into()));
        }
        Ok(ZKernel { pi, kernel })
    }

    /// The i.i.d. chain with marginal `pi`.
    pub fn bernoulli(pi: Vec<Rational>) -> Self {
        let kernel = Kernel::constant_rows(&pi);
        ZKernel { pi, kernel }
    }

    /// Probability of the word `seq` at times `0, 1, …`.
    pub fn cylinder(&self, seq: &[Symbol]) -> Rational {
        let Some(&first) = seq.first() else {
            return Rational::one();
        };
        seq.windows(2)
            .fold(self.pi[first].clone(), |acc, p| acc * self.kernel.get(p[0], p[1]))
    }
}

/// A Markov measure over the free group of rank `kernels.len()`.
#[derive(Clone, PartialEq, Eq)]
pub struct MarkovSpec {
    alphabet: Vec<String>,
    pi: Vec<Rational>,
    kernels: Vec<Kernel>,
}

impl MarkovSpec {
    /// Checks shapes only; stochasticity and stationarity are left to
    /// [`validate`] so that invalid specs can still be reported on.
    pub fn new(alphabet: Vec<String>, pi: Vec<Rational>, kernels: Vec<Kernel>) -> Result<Self, Error> {
        let n = alphabet.len();
        if n == 0 {
            return Err(Error::InvalidSpec("empty alphabet".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = alphabet.iter().find(|a| !seen.insert(a.as_str())) {
            return Err(Error::InvalidSpec(format!("symbol {dup:?} listed twice")));
        }
        if kernels.len() < 2 {
            return Err(Error::InvalidSpec("the free group needs at least two generators".into()));
        }
        if pi.len() != n || kernels.iter().any(|k| k.size() != n) {
            return Err(Error::InvalidSpec(format!("dimensions disagree with alphabet of size {n}")));
        }
        Ok(MarkovSpec { alphabet, pi, kernels })
    }

    /// Symbols named `0, 1, …, n-1`.
    pub fn numbered(pi: Vec<Rational>, kernels: Vec<Kernel>) -> Result<Self, Error> {
        let alphabet = (0..pi.len()).map(|a| a.to_string()).collect();
        MarkovSpec::new(alphabet, pi, kernels)
    }

    pub fn rank(&self) -> usize {
        self.kernels.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn symbol_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.alphabet.iter().position(|a| a == name)
    }

    pub fn pi(&self) -> &[Rational] {
        &self.pi
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    pub fn kernel(&self, s: usize) -> Result<&Kernel, Error> {
        self.kernels.get(s).ok_or(Error::UnknownGenerator(s))
    }

    /// A copy with generator `s`'s kernel replaced.
    pub fn with_kernel(&self, s: usize, kernel: Kernel) -> Result<Self, Error> {
        if s >= self.rank() {
            return Err(Error::UnknownGenerator(s));
        }
        if kernel.size() != self.symbol_count() {
            return Err(Error::Mismatch("replacement kernel has the wrong size".into()));
        }
        let mut out = self.clone();
        out.kernels[s] = kernel;
        Ok(out)
    }

    /// Forward and reversed kernels for every letter.
    pub fn letter_kernels(&self) -> Result<LetterKernels, Error> {
        let backward = self
            .kernels
            .iter()
            .map(|k| k.reversed(&self.pi))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LetterKernels {
            pi: self.pi.clone(),
            forward: self.kernels.clone(),
            backward,
        })
    }
}

impl fmt::Debug for MarkovSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarkovSpec")
            .field("alphabet", &self.alphabet)
            .field("pi", &self.pi.iter().map(rational::format).collect::<Vec<_>>())
            .field("kernels", &self.kernels)
            .finish()
    }
}

/// Transition kernels indexed by letters: `P_s` along `s`, `P̂_s` along `s^{-1}`.
#[derive(Clone, Debug)]
pub struct LetterKernels {
    pi: Vec<Rational>,
    forward: Vec<Kernel>,
    backward: Vec<Kernel>,
}

impl LetterKernels {
    pub fn pi(&self) -> &[Rational] {
        &self.pi
    }

    pub fn step(&self, l: Letter) -> &Kernel {
        if l.is_inverse() {
            &self.backward[l.generator()]
        } else {
            &self.forward[l.generator()]
        }
    }

    pub fn symbol_count(&self) -> usize {
        self.pi.len()
    }

    pub fn rank(&self) -> usize {
        self.forward.len()
    }
}

/// One violated invariant of a [`MarkovSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ZeroMass { symbol: String },
    PiSum { sum: String },
    NegativeEntry { generator: usize, row: String, column: String },
    RowSum { generator: usize, row: String, sum: String },
    NotStationary { generator: usize, symbol: String, mass: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroMass { symbol } => write!(f, "pi({symbol}) = 0"),
            Violation::PiSum { sum } => write!(f, "pi sums to {sum}"),
            Violation::NegativeEntry { generator, row, column } => {
                write!(f, "P_s{}({row}, {column}) < 0", generator + 1)
            }
            Violation::RowSum { generator, row, sum } => {
                write!(f, "row {row} of P_s{} sums to {sum}", generator + 1)
            }
            Violation::NotStationary { generator, symbol, mass } => {
                write!(f, "(pi P_s{})({symbol}) = {mass} differs from pi", generator + 1)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks full support and normalisation of `π`, row-stochasticity of every
/// kernel and stationarity `π P_s = π`.
pub fn validate(spec: &MarkovSpec) -> ValidationReport {
    let mut violations = Vec::new();
    let name = |a: usize| spec.alphabet[a].clone();
    for (a, p) in spec.pi.iter().enumerate() {
        if !rational::is_positive(p) {
            violations.push(Violation::ZeroMass { symbol: name(a) });
        }
    }
    let total: Rational = spec.pi.iter().sum();
    if !total.is_one() {
        violations.push(Violation::PiSum {
            sum: rational::format(&total),
        });
    }
    for (s, k) in spec.kernels.iter().enumerate() {
        for a in 0..k.size() {
            for b in 0..k.size() {
                if k.get(a, b).is_negative() {
                    violations.push(Violation::NegativeEntry {
                        generator: s,
                        row: name(a),
                        column: name(b),
                    });
                }
            }
            let sum = k.row_sum(a);
            if !sum.is_one() {
                violations.push(Violation::RowSum {
                    generator: s,
                    row: name(a),
                    sum: rational::format(&sum),
                });
            }
        }
        for (b, mass) in k.left_apply(&spec.pi).iter().enumerate() {
            if mass != &spec.pi[b] {
                violations.push(Violation::NotStationary {
                    generator: s,
                    symbol: name(b),
                    mass: rational::format(mass),
                });
            }
        }
    }
    ValidationReport { violations }
}

pub(crate) fn require_valid(spec: &MarkovSpec) -> Result<(), Error> {
    let report = validate(spec);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidSpec(v.to_string())),
    }
}

/// `P̂_s(a, b) = π(b) P_s(b, a) / π(a)`.
pub fn reverse_kernel(spec: &MarkovSpec, s: usize) -> Result<Kernel, Error> {
    spec.kernel(s)?.reversed(&spec.pi)
}

/// Exact measure of the cylinder `Cyl(φ)`: `π(φ(e))` times the transition
/// probability along every edge `σ(g) → g` of the domain.
pub fn cylinder_measure(spec: &MarkovSpec, phi: &Configuration) -> Result<Rational, Error> {
    let kernels = spec.letter_kernels()?;
    cylinder_measure_with(&kernels, phi)
}

pub fn cylinder_measure_with(kernels: &LetterKernels, phi: &Configuration) -> Result<Rational, Error> {
    let domain = phi.left_connected_domain()?;
    let mut mass = Rational::one();
    for g in domain.iter() {
        let value = phi.get(g).expect("domain element");
        if value >= kernels.symbol_count() {
            return Err(Error::Mismatch(format!("symbol index {value} at {g} is out of range")));
        }
        let factor = match g.parent() {
            None => &kernels.pi[value],
            Some(p) => {
                let l = g.first().expect("non-identity");
                if l.generator() >= kernels.rank() {
                    return Err(Error::UnknownGenerator(l.generator()));
                }
                kernels.step(l).get(phi.get(&p).expect("parent in domain"), value)
            }
        };
        if factor.is_zero() {
            return Ok(Rational::zero());
        }
        mass *= factor;
    }
    Ok(mass)
}

/// The symbolic restriction to `<s>`: the stationary chain `(π, P_s)`.
pub fn restriction(spec: &MarkovSpec, s: usize) -> Result<ZKernel, Error> {
    Ok(ZKernel {
        pi: spec.pi.clone(),
        kernel: spec.kernel(s)?.clone(),
    })
}

/// The unique Markov measure whose restriction to each generator is the
/// given chain. All chains must share their stationary distribution.
pub fn assemble(alphabet: Vec<String>, restrictions: Vec<ZKernel>) -> Result<MarkovSpec, Error> {
    let Some(first) = restrictions.first() else {
        return Err(Error::InvalidSpec("no generators".into()));
    };
    let pi = first.pi.clone();
    for (s, nu) in restrictions.iter().enumerate() {
        if nu.pi.len() != alphabet.len() || nu.kernel.size() != alphabet.len() {
            return Err(Error::Mismatch(format!("restriction to s{} uses a different alphabet", s + 1)));
        }
        if nu.pi != pi {
            return Err(Error::Mismatch(format!(
                "restriction to s{} has a different stationary distribution",
                s + 1
            )));
        }
    }
    MarkovSpec::new(alphabet, pi, restrictions.into_iter().map(|nu| nu.kernel).collect())
}

/// The Bernoulli shift `(A, π)^F` written as a Markov spec.
pub fn bernoulli_spec(alphabet: Vec<String>, pi: Vec<Rational>, rank: usize) -> Result<MarkovSpec, Error> {
    if let Some(a) = pi.iter().position(|p| !rational::is_positive(p)) {
        return Err(Error::InvalidSpec(format!("symbol {:?} has no mass", alphabet.get(a))));
    }
    let kernel = Kernel::constant_rows(&pi);
    MarkovSpec::new(alphabet, pi, vec![kernel; rank])
}
