//! Configurations `x: D → A` and read-only views of them.

use std::collections::HashMap;
use std::fmt;

use crate::error::Error;
use crate::freegroup::{is_left_connected, LeftConnectedSet, Word};

/// Index of a symbol in the alphabet.
pub type Symbol = usize;

/// A lookup fell outside the domain of the underlying finite configuration.
/// The word is in the coordinates of that configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Missing(pub Word);

impl From<Missing> for Error {
    fn from(m: Missing) -> Self {
        Error::MissingCoordinate(m.0)
    }
}

/// Anything that can report `x_g`.
pub trait Window {
    fn value(&self, g: &Word) -> Result<Symbol, Missing>;
}

impl<W: Window + ?Sized> Window for &W {
    fn value(&self, g: &Word) -> Result<Symbol, Missing> {
        (**self).value(g)
    }
}

impl<W: Window + ?Sized> Window for Box<W> {
    fn value(&self, g: &Word) -> Result<Symbol, Missing> {
        (**self).value(g)
    }
}

/// The shifted configuration `w·x`, read as `(w·x)_f = x_{fw}`.
#[derive(Clone, Debug)]
pub struct Shifted<W> {
    base: W,
    by: Word,
}

impl<W: Window> Shifted<W> {
    pub fn new(base: W, by: Word) -> Self {
        Shifted { base, by }
    }
}

impl<W: Window> Window for Shifted<W> {
    fn value(&self, f: &Word) -> Result<Symbol, Missing> {
        self.base.value(&f.multiply(&self.by))
    }
}

/// A finite partial assignment of symbols to group elements.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Configuration {
    values: HashMap<Word, Symbol>,
}

impl Configuration {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a configuration on a left-connected domain from values listed
    /// in the domain's order.
    pub fn on(domain: &LeftConnectedSet, values: &[Symbol]) -> Result<Self, Error> {
        if domain.len() != values.len() {
            return Err(Error::Mismatch(format!(
                "{} values for a domain of {} words",
                values.len(),
                domain.len()
            )));
        }
        Ok(Configuration {
            values: domain.iter().cloned().zip(values.iter().copied()).collect(),
        })
    }

    pub fn from_pairs<I: IntoIterator<Item = (Word, Symbol)>>(pairs: I) -> Self {
        Configuration {
            values: pairs.into_iter().collect(),
        }
    }

    pub fn get(&self, g: &Word) -> Option<Symbol> {
        self.values.get(g).copied()
    }

    pub fn contains(&self, g: &Word) -> bool {
        self.values.contains_key(g)
    }

    pub fn insert(&mut self, g: Word, a: Symbol) -> Option<Symbol> {
        self.values.insert(g, a)
    }

    pub fn remove(&mut self, g: &Word) -> Option<Symbol> {
        self.values.remove(g)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Entries in shortlex order of their words.
    pub fn sorted(&self) -> Vec<(&Word, Symbol)> {
        let mut v: Vec<(&Word, Symbol)> = self.values.iter().map(|(g, &a)| (g, a)).collect();
        v.sort();
        v
    }

    pub fn domain(&self) -> Vec<Word> {
        self.sorted().into_iter().map(|(g, _)| g.clone()).collect()
    }

    /// The domain as a [`LeftConnectedSet`], failing when it is not one.
    pub fn left_connected_domain(&self) -> Result<LeftConnectedSet, Error> {
        LeftConnectedSet::new(self.values.keys().cloned())
    }

    pub fn is_left_connected(&self) -> bool {
        is_left_connected(&self.domain())
    }

    /// Restriction to the words of `domain`.
    pub fn restrict<'a, I: IntoIterator<Item = &'a Word>>(&self, domain: I) -> Result<Self, Error> {
        domain
            .into_iter()
            .map(|g| {
                self.get(g)
                    .map(|a| (g.clone(), a))
                    .ok_or_else(|| Error::MissingCoordinate(g.clone()))
            })
            .collect::<Result<HashMap<_, _>, _>>()
            .map(|values| Configuration { values })
    }

    /// Materialises any window on the given words.
    pub fn capture<'a, W, I>(x: &W, domain: I) -> Result<Self, Missing>
    where
        W: Window + ?Sized,
        I: IntoIterator<Item = &'a Word>,
    {
        let mut values = HashMap::new();
        for g in domain {
            values.insert(g.clone(), x.value(g)?);
        }
        Ok(Configuration { values })
    }

    /// The configuration `ψ` on `D h^{-1}` with `ψ(d h^{-1}) = φ(d)`, i.e.
    /// `h·φ` read on its natural domain.
    pub fn translate(&self, h: &Word) -> Configuration {
        let h_inv = h.inverse();
        Configuration {
            values: self.values.iter().map(|(d, &a)| (d.multiply(&h_inv), a)).collect(),
        }
    }
}

impl Window for Configuration {
    fn value(&self, g: &Word) -> Result<Symbol, Missing> {
        self.values.get(g).copied().ok_or_else(|| Missing(g.clone()))
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.sorted().into_iter().map(|(g, a)| (g.to_string(), a))).finish()
    }
}
