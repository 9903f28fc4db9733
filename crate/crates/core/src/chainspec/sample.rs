//! Reproducible sampling from a Markov measure.
//!
//! Every coordinate `x_g` of sample `i` is drawn from its own generator keyed
//! by `(seed, i, g)`, so samples can be read lazily on any domain and in any
//! order without changing their values.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Configuration, Missing, Symbol, Window};
use super::{rational, LetterKernels, MarkovSpec};
use crate::error::Error;
use crate::freegroup::{ball, Letter, Word};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn letter_code(l: Letter) -> u64 {
    2 * l.generator() as u64 + u64::from(l.is_inverse()) + 1
}

/// Cumulative row tables for every letter, in floating point.
#[derive(Clone, Debug)]
pub struct Sampler {
    seed: u64,
    root: Vec<f64>,
    forward: Vec<Vec<Vec<f64>>>,
    backward: Vec<Vec<Vec<f64>>>,
}

fn cumulative(row: &[rational::Rational]) -> Vec<f64> {
    let mut acc = 0.0;
    row.iter()
        .map(|p| {
            acc += rational::to_f64(p);
            acc
        })
        .collect()
}

fn draw(cdf: &[f64], u: f64) -> Symbol {
    // the last symbol with positive mass absorbs rounding at the top
    let last = (0..cdf.len())
        .rev()
        .find(|&i| cdf[i] > if i == 0 { 0.0 } else { cdf[i - 1] })
        .unwrap_or(0);
    cdf.iter().position(|&c| u < c).unwrap_or(last)
}

impl Sampler {
    pub fn new(spec: &MarkovSpec, seed: u64) -> Result<Self, Error> {
        super::require_valid(spec)?;
        Ok(Self::from_kernels(&spec.letter_kernels()?, seed))
    }

    pub fn from_kernels(k: &LetterKernels, seed: u64) -> Self {
        let n = k.symbol_count();
        let table = |l: Letter| (0..n).map(|a| cumulative(k.step(l).row(a))).collect::<Vec<_>>();
        Sampler {
            seed,
            root: cumulative(k.pi()),
            forward: (0..k.rank()).map(|s| table(Letter::gen(s))).collect(),
            backward: (0..k.rank()).map(|s| table(Letter::inv(s))).collect(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rank(&self) -> usize {
        self.forward.len()
    }

    fn uniform(&self, index: u64, g: &Word) -> f64 {
        let mut key = splitmix64(self.seed ^ splitmix64(index));
        for &l in g.letters() {
            key = splitmix64(key ^ letter_code(l));
        }
        key = splitmix64(key ^ g.len() as u64);
        ChaCha8Rng::seed_from_u64(key).random::<f64>()
    }

    fn draw_child(&self, index: u64, g: &Word, parent_value: Option<Symbol>) -> Symbol {
        let u = self.uniform(index, g);
        match (g.first(), parent_value) {
            (Some(l), Some(a)) => {
                let tables = if l.is_inverse() { &self.backward } else { &self.forward };
                draw(&tables[l.generator()][a], u)
            }
            _ => draw(&self.root, u),
        }
    }

    /// The `index`-th sample, defined on the whole group.
    pub fn sample(&self, index: u64) -> LazySample<'_> {
        LazySample {
            sampler: self,
            index,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

/// A sampled configuration on all of `F`, materialised on demand.
pub struct LazySample<'a> {
    sampler: &'a Sampler,
    index: u64,
    cache: Mutex<HashMap<Word, Symbol>>,
}

impl LazySample<'_> {
    pub fn get(&self, g: &Word) -> Symbol {
        if let Some(&a) = self.cache.lock().expect("sample cache").get(g) {
            return a;
        }
        let mut parent = None;
        for h in g.geodesic() {
            let cached = self.cache.lock().expect("sample cache").get(&h).copied();
            let a = match cached {
                Some(a) => a,
                None => {
                    let a = self.sampler.draw_child(self.index, &h, parent);
                    self.cache.lock().expect("sample cache").insert(h, a);
                    a
                }
            };
            parent = Some(a);
        }
        parent.expect("geodesic contains e")
    }

    pub fn capture<'a, I: IntoIterator<Item = &'a Word>>(&self, domain: I) -> Configuration {
        Configuration::from_pairs(domain.into_iter().map(|g| (g.clone(), self.get(g))))
    }
}

impl Window for LazySample<'_> {
    fn value(&self, g: &Word) -> Result<Symbol, Missing> {
        Ok(self.get(g))
    }
}

/// A sample on the ball of the given radius.
pub fn sample_ball(spec: &MarkovSpec, radius: usize, seed: u64) -> Result<Configuration, Error> {
    let domain = ball(spec.rank(), radius)?;
    let sampler = Sampler::new(spec, seed)?;
    Ok(sampler.sample(0).capture(domain.iter()))
}

/// Fraction of `samples` agreeing with `phi` on its domain.
pub fn empirical_cylinder<W: Window>(samples: &[W], phi: &Configuration) -> Result<f64, Error> {
    if samples.is_empty() {
        return Err(Error::Mismatch("no samples".into()));
    }
    let mut hits = 0usize;
    for x in samples {
        let mut all = true;
        for (g, a) in phi.sorted() {
            if x.value(g)? != a {
                all = false;
                break;
            }
        }
        hits += usize::from(all);
    }
    Ok(hits as f64 / samples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{m1, uniform_bernoulli};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn reproducible_and_order_independent() {
        let spec = m1();
        let a = sample_ball(&spec, 3, 7).unwrap();
        let b = sample_ball(&spec, 3, 7).unwrap();
        assert_eq!(a, b);
        let sampler = Sampler::new(&spec, 7).unwrap();
        let lazy = sampler.sample(0);
        for (g, v) in a.sorted().into_iter().rev() {
            assert_eq!(lazy.get(g), v);
        }
        assert_ne!(sample_ball(&spec, 3, 8).unwrap(), a);
    }

    #[test]
    fn swap_edges_always_swap() {
        let spec = m1();
        let sampler = Sampler::new(&spec, 1).unwrap();
        let s2 = Letter::gen(1);
        for i in 0..200 {
            let x = sampler.sample(i);
            for g in ball(2, 2).unwrap().iter() {
                assert_ne!(x.get(g), x.get(&g.left_mul(s2)));
            }
        }
    }

    #[test]
    fn quarter_cylinder_frequency() {
        let spec = m1();
        let sampler = Sampler::new(&spec, 2024).unwrap();
        let n = 100_000u64;
        let samples: Vec<_> = (0..n).map(|i| sampler.sample(i)).collect();
        let phi = Configuration::from_pairs([(Word::identity(), 0), (w("s1"), 1), (w("s2.s1"), 0)]);
        let p = empirical_cylinder(&samples, &phi).unwrap();
        let sigma = (0.25f64 * 0.75 / n as f64).sqrt();
        assert!((p - 0.25).abs() < 4.0 * sigma, "{p}");
    }

    #[test]
    fn bernoulli_chi_square() {
        let spec = uniform_bernoulli(3, 2);
        let sampler = Sampler::new(&spec, 99).unwrap();
        let mut counts = [0f64; 3];
        let g = w("s1^-1.s2");
        for i in 0..10_000 {
            counts[sampler.sample(i).get(&g)] += 1.0;
        }
        let chi: f64 = counts.iter().map(|c| (c - 10_000.0 / 3.0).powi(2) / (10_000.0 / 3.0)).sum();
        // 2 degrees of freedom, 0.999 quantile
        assert!(chi < 13.82, "{chi}");
    }

    #[test]
    fn empirical_edges() {
        let spec = m1();
        let samples = vec![sample_ball(&spec, 1, 3).unwrap()];
        let phi = samples[0].restrict([&Word::identity()]).unwrap();
        assert_eq!(empirical_cylinder(&samples, &phi).unwrap(), 1.0);
        let mut other = phi.clone();
        other.insert(Word::identity(), 1 - phi.get(&Word::identity()).unwrap());
        assert_eq!(empirical_cylinder(&samples, &other).unwrap(), 0.0);
        let far = Configuration::from_pairs([(w("s1.s1.s1"), 0)]);
        assert!(empirical_cylinder(&samples, &far).is_err());
    }
}
