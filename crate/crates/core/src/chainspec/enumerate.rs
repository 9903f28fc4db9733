//! Exact enumeration of a finite-window quantity over all configurations.
//!
//! The quantity is a closure over a partial [`Configuration`]. When it asks
//! for a coordinate that is not assigned yet, the explorer branches on every
//! symbol for the shortest unassigned suffix of that word, so partial domains
//! stay suffix-closed (hence left-connected) and each leaf is a cylinder whose
//! exact measure is known. Leaves partition the configuration space.

use num_traits::{One, Zero};

use super::config::{Configuration, Missing, Symbol};
use super::{cylinder_measure_with, LetterKernels, Rational};
use crate::error::Error;
use crate::freegroup::Word;

pub const DEFAULT_LEAF_BUDGET: usize = 1 << 21;

enum Mode<'a> {
    Weighted(&'a LetterKernels),
    Unweighted(usize),
}

/// Decision-tree explorer. Weighted runs skip null cylinders and report
/// each leaf's exact measure; unweighted runs visit every symbol with
/// weight one.
pub struct Enumerator<'a> {
    mode: Mode<'a>,
    budget: usize,
}

impl<'a> Enumerator<'a> {
    pub fn weighted(kernels: &'a LetterKernels) -> Self {
        Enumerator {
            mode: Mode::Weighted(kernels),
            budget: DEFAULT_LEAF_BUDGET,
        }
    }

    pub fn unweighted(symbols: usize) -> Self {
        Enumerator {
            mode: Mode::Unweighted(symbols),
            budget: DEFAULT_LEAF_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    fn symbols(&self) -> usize {
        match self.mode {
            Mode::Weighted(k) => k.symbol_count(),
            Mode::Unweighted(n) => n,
        }
    }

    fn extension_weight(&self, phi: &Configuration, g: &Word, a: Symbol) -> Rational {
        match self.mode {
            Mode::Unweighted(_) => Rational::one(),
            Mode::Weighted(k) => match g.parent() {
                None => k.pi()[a].clone(),
                Some(p) => {
                    let l = g.first().expect("non-identity");
                    k.step(l).get(phi.get(&p).expect("suffix-closed"), a).clone()
                }
            },
        }
    }

    /// Runs `eval` on every leaf below `start` and hands the leaf, its weight
    /// and the result to `visit`. Returns the number of leaves.
    pub fn run<T, F, V>(&self, start: Configuration, mut eval: F, mut visit: V) -> Result<usize, Error>
    where
        F: FnMut(&Configuration) -> Result<T, Missing>,
        V: FnMut(&Configuration, &Rational, T) -> Result<(), Error>,
    {
        let weight = match self.mode {
            Mode::Weighted(k) if !start.is_empty() => cylinder_measure_with(k, &start)?,
            _ => Rational::one(),
        };
        if !start.is_empty() && !start.contains(&Word::identity()) {
            return Err(Error::NotLeftConnected("start configuration misses e".into()));
        }
        if weight.is_zero() {
            return Ok(0);
        }
        let mut leaves = 0usize;
        let mut stack = vec![(start, weight)];
        while let Some((phi, w)) = stack.pop() {
            match eval(&phi) {
                Ok(value) => {
                    leaves += 1;
                    if leaves > self.budget {
                        return Err(Error::EnumerationBudget(self.budget));
                    }
                    visit(&phi, &w, value)?;
                }
                Err(Missing(g)) => {
                    let next = g
                        .geodesic()
                        .find(|h| !phi.contains(h))
                        .ok_or_else(|| Error::Precondition(format!("{g} reported missing but is assigned")))?;
                    for a in (0..self.symbols()).rev() {
                        let factor = self.extension_weight(&phi, &next, a);
                        if factor.is_zero() {
                            continue;
                        }
                        let mut child = phi.clone();
                        child.insert(next.clone(), a);
                        stack.push((child, &w * factor));
                    }
                }
            }
        }
        Ok(leaves)
    }

    /// Exact expectation of a rational-valued observable.
    pub fn expectation<F>(&self, mut eval: F) -> Result<Rational, Error>
    where
        F: FnMut(&Configuration) -> Result<Rational, Missing>,
    {
        let mut total = Rational::zero();
        self.run(Configuration::new(), &mut eval, |_, w, v| {
            total += w * v;
            Ok(())
        })?;
        Ok(total)
    }

    /// Exact law of a finite-valued observable, sorted by value.
    pub fn distribution<T, F>(&self, eval: F) -> Result<Vec<(T, Rational)>, Error>
    where
        T: Ord,
        F: FnMut(&Configuration) -> Result<T, Missing>,
    {
        let mut law = std::collections::BTreeMap::<T, Rational>::new();
        self.run(Configuration::new(), eval, |_, w, v| {
            *law.entry(v).or_insert_with(Rational::zero) += w;
            Ok(())
        })?;
        Ok(law.into_iter().collect())
    }

    /// First leaf where `eval` returns `false`, if any.
    pub fn counterexample<F>(&self, start: Configuration, mut eval: F) -> Result<Option<Configuration>, Error>
    where
        F: FnMut(&Configuration) -> Result<bool, Missing>,
    {
        let mut found = None;
        let result = self.run(start, &mut eval, |phi, _, ok| {
            if !ok {
                found = Some(phi.clone());
                return Err(Error::Precondition(String::new()));
            }
            Ok(())
        });
        match (found, result) {
            (Some(phi), _) => Ok(Some(phi)),
            (None, Err(e)) => Err(e),
            (None, Ok(_)) => Ok(None),
        }
    }
}
