//! Alternative actions from finite-window generator rewrites.
//!
//! A rule `τ(s, x)` for each letter `s` extends to the cocycle `ω(g, x)` by
//! `ω(s h, x) = τ(s, h∗x) ω(h, x)` with `h∗x = ω(h, x)·x`, and to the
//! recoding `(Ωx)_h = x_{ω(h, x)}`. Everything is evaluated lazily against a
//! [`Window`]; reading outside a finite configuration surfaces as [`Missing`].

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::chainspec::{Configuration, Enumerator, MarkovSpec, Missing, Sampler, Shifted, Symbol, Window};
use crate::check::Check;
use crate::error::Error;
use crate::freegroup::{ball, Letter, Word};

pub type Rule = dyn Fn(Letter, &dyn Window) -> Result<Word, Missing> + Send + Sync;

/// `τ` together with the bounds used for budgeting: every rewrite reads
/// `x` inside the ball of radius `window_radius` and returns a word of
/// length at most `max_output_length`.
#[derive(Clone)]
pub struct TauSpec {
    rank: usize,
    window_radius: usize,
    max_output_length: usize,
    rule: Arc<Rule>,
}

impl TauSpec {
    pub fn new<F>(rank: usize, window_radius: usize, max_output_length: usize, rule: F) -> Self
    where
        F: Fn(Letter, &dyn Window) -> Result<Word, Missing> + Send + Sync + 'static,
    {
        TauSpec {
            rank,
            window_radius,
            max_output_length,
            rule: Arc::new(rule),
        }
    }

    /// `τ(s, x) = s` for every letter.
    pub fn identity(rank: usize) -> Self {
        TauSpec::new(rank, 0, 1, |l, _| Ok(Word::letter(l)))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn window_radius(&self) -> usize {
        self.window_radius
    }

    pub fn max_output_length(&self) -> usize {
        self.max_output_length
    }

    pub fn rewrite(&self, l: Letter, x: &dyn Window) -> Result<Word, Missing> {
        (self.rule)(l, x)
    }
}

impl fmt::Debug for TauSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TauSpec")
            .field("rank", &self.rank)
            .field("window_radius", &self.window_radius)
            .field("max_output_length", &self.max_output_length)
            .finish_non_exhaustive()
    }
}

/// `ω(g, x)`, reading letters of `g` from the right.
pub fn omega<W: Window + ?Sized>(tau: &TauSpec, g: &Word, x: &W) -> Result<Word, Missing> {
    let mut w = Word::identity();
    for &l in g.letters().iter().rev() {
        let step = tau.rewrite(l, &Shifted::new(x, w.clone()))?;
        w = step.multiply(&w);
    }
    Ok(w)
}

/// A radius `R` such that `ω(g, ·)` and `(Ω·)_g` for `|g| ≤ r` only read
/// coordinates in the ball of radius `R`.
pub fn dependency_radius(tau: &TauSpec, r: usize) -> usize {
    r * tau.max_output_length + tau.window_radius
}

/// Memoised `ω(·, x)` for one configuration. It also reads as the recoded
/// configuration `Ωx`.
pub struct CocycleTable<'t, W> {
    tau: &'t TauSpec,
    x: W,
    cache: Mutex<HashMap<Word, Word>>,
}

impl<'t, W: Window> CocycleTable<'t, W> {
    pub fn new(tau: &'t TauSpec, x: W) -> Self {
        CocycleTable {
            tau,
            x,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn base(&self) -> &W {
        &self.x
    }

    pub fn omega(&self, g: &Word) -> Result<Word, Missing> {
        let Some(parent) = g.parent() else {
            return Ok(Word::identity());
        };
        if let Some(w) = self.cache.lock().expect("cocycle cache").get(g) {
            return Ok(w.clone());
        }
        let inner = self.omega(&parent)?;
        let l = g.first().expect("non-identity");
        let step = self.tau.rewrite(l, &Shifted::new(&self.x, inner.clone()))?;
        let w = step.multiply(&inner);
        self.cache.lock().expect("cocycle cache").insert(g.clone(), w.clone());
        Ok(w)
    }
}

impl<W: Window> Window for CocycleTable<'_, W> {
    fn value(&self, h: &Word) -> Result<Symbol, Missing> {
        self.x.value(&self.omega(h)?)
    }
}

/// `g ∗ x = ω(g, x)·x`, as a configuration on its natural domain.
pub fn star(tau: &TauSpec, g: &Word, x: &Configuration) -> Result<Configuration, Error> {
    let w = omega(tau, g, x)?;
    Ok(x.translate(&w))
}

/// `Ωx` on the ball of radius `target_radius`.
pub fn apply_omega_map(tau: &TauSpec, x: &Configuration, target_radius: usize) -> Result<Configuration, Error> {
    let domain = ball(tau.rank(), target_radius)?;
    let table = CocycleTable::new(tau, x);
    let mut out = Configuration::new();
    for h in domain.iter() {
        out.insert(h.clone(), table.value(h)?);
    }
    Ok(out)
}

fn witness(phi: &Configuration, what: impl fmt::Display) -> String {
    format!("{what} on window {phi:?}")
}

/// `τ(s⁻¹, τ(s, x)·x) = τ(s, x)⁻¹` for every letter and every window of
/// positive measure.
pub fn check_involution(tau: &TauSpec, spec: &MarkovSpec) -> Result<Check, Error> {
    let kernels = spec.letter_kernels()?;
    let explorer = Enumerator::weighted(&kernels);
    for l in Letter::all(tau.rank()) {
        let bad = explorer.counterexample(Configuration::new(), |x| {
            let w = tau.rewrite(l, x)?;
            let back = tau.rewrite(l.inverse(), &Shifted::new(x, w.clone()))?;
            Ok(back == w.inverse())
        })?;
        if let Some(phi) = bad {
            let w = tau.rewrite(l, &phi)?;
            return Ok(Check::fail("involution", witness(&phi, format!("tau({l}) = {w}"))));
        }
    }
    Ok(Check::pass("involution"))
}

/// `g ∈ past(s) ⇔ ω(g, x) ∈ past(s)` for all `|g| ≤ r` on windows of
/// positive measure.
pub fn check_past_preservation(tau: &TauSpec, spec: &MarkovSpec, s: Letter, r: usize) -> Result<Check, Error> {
    let name = format!("past({s}) preserved");
    let kernels = spec.letter_kernels()?;
    let explorer = Enumerator::weighted(&kernels);
    for g in ball(tau.rank(), r)?.iter() {
        let bad = explorer.counterexample(Configuration::new(), |x| {
            Ok(g.in_past(s) == omega(tau, g, x)?.in_past(s))
        })?;
        if let Some(phi) = bad {
            let w = omega(tau, g, &phi)?;
            return Ok(Check::fail(name, witness(&phi, format!("omega({g}) = {w}"))));
        }
    }
    Ok(Check::pass(name))
}

/// `ω(ω̂(s, Ωx), x) = s` for every letter on windows of positive measure,
/// then `Ω̂Ωx = x` on the ball of radius `r` for `samples` sampled `x`.
pub fn check_inverse_pair(
    tau: &TauSpec,
    tau_hat: &TauSpec,
    spec: &MarkovSpec,
    r: usize,
    samples: u64,
    seed: u64,
) -> Result<Check, Error> {
    let kernels = spec.letter_kernels()?;
    let explorer = Enumerator::weighted(&kernels);
    for l in Letter::all(tau.rank()) {
        let s = Word::letter(l);
        let bad = explorer.counterexample(Configuration::new(), |x| {
            let recoded = CocycleTable::new(tau, x);
            let hat = omega(tau_hat, &s, &recoded)?;
            Ok(omega(tau, &hat, x)? == s)
        })?;
        if let Some(phi) = bad {
            return Ok(Check::fail("inverse pair", witness(&phi, format!("letter {l}"))));
        }
    }
    let sampler = Sampler::from_kernels(&kernels, seed);
    let domain = ball(tau.rank(), r)?;
    for i in 0..samples {
        let x = sampler.sample(i);
        let recoded = CocycleTable::new(tau, &x);
        let back = CocycleTable::new(tau_hat, &recoded);
        for h in domain.iter() {
            if back.value(h)? != x.get(h) {
                return Ok(Check::fail(
                    "inverse pair",
                    format!("sample {i} (seed {seed}) differs at {h}"),
                ));
            }
        }
    }
    Ok(Check::pass("inverse pair"))
}

/// `ω(gh, x) = ω(g, h∗x) ω(h, x)` for all `|g| + |h| ≤ max_len` on
/// `samples` sampled configurations.
pub fn check_cocycle_identity(
    tau: &TauSpec,
    spec: &MarkovSpec,
    max_len: usize,
    samples: u64,
    seed: u64,
) -> Result<Check, Error> {
    let name = "cocycle identity";
    let sampler = Sampler::new(spec, seed)?;
    let words = ball(tau.rank(), max_len)?;
    for i in 0..samples {
        let x = sampler.sample(i);
        let table = CocycleTable::new(tau, &x);
        for h in words.iter() {
            let wh = table.omega(h)?;
            let moved = Shifted::new(&x, wh.clone());
            for g in words.iter().filter(|g| g.len() + h.len() <= max_len) {
                let lhs = table.omega(&g.multiply(h))?;
                let rhs = omega(tau, g, &moved)?.multiply(&wh);
                if lhs != rhs {
                    return Ok(Check::fail(
                        name,
                        format!("sample {i} (seed {seed}), g = {g}, h = {h}: {lhs} vs {rhs}"),
                    ));
                }
            }
        }
    }
    Ok(Check::pass(name))
}

/// `g·(Ωx) = Ω(g∗x)` on the ball of radius `r` for every letter `g`.
pub fn check_equivariance(tau: &TauSpec, spec: &MarkovSpec, r: usize, samples: u64, seed: u64) -> Result<Check, Error> {
    let name = "equivariance";
    let sampler = Sampler::new(spec, seed)?;
    let domain = ball(tau.rank(), r)?;
    for i in 0..samples {
        let x = sampler.sample(i);
        let recoded = CocycleTable::new(tau, &x);
        for l in Letter::all(tau.rank()) {
            let g = Word::letter(l);
            let moved = Shifted::new(&x, recoded.omega(&g)?);
            let after = CocycleTable::new(tau, &moved);
            for f in domain.iter() {
                if recoded.value(&f.multiply(&g))? != after.value(f)? {
                    return Ok(Check::fail(name, format!("sample {i} (seed {seed}), g = {g}, at {f}")));
                }
            }
        }
    }
    Ok(Check::pass(name))
}

/// `Ω(Ωx) = x` on the ball of radius `r`.
pub fn check_omega_involution(tau: &TauSpec, spec: &MarkovSpec, r: usize, samples: u64, seed: u64) -> Result<Check, Error> {
    let name = "omega map is an involution";
    let sampler = Sampler::new(spec, seed)?;
    let domain = ball(tau.rank(), r)?;
    for i in 0..samples {
        let x = sampler.sample(i);
        let once = CocycleTable::new(tau, &x);
        let twice = CocycleTable::new(tau, &once);
        if let Some(h) = domain.iter().find(|h| twice.value(h) != Ok(x.get(h))) {
            return Ok(Check::fail(name, format!("sample {i} (seed {seed}) differs at {h}")));
        }
    }
    Ok(Check::pass(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::m1;
    use crate::chainspec::Sampler;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    /// A rewrite that depends on the window: along s1 jump two steps when
    /// `x_e = 1`. It violates the involution identity.
    fn broken() -> TauSpec {
        TauSpec::new(2, 0, 2, |l, _| {
            Ok(if l == Letter::gen(0) {
                w("s1.s2")
            } else {
                Word::letter(l)
            })
        })
    }

    /// Along s2, step to whichever neighbour carries symbol 0. Satisfies the
    /// involution identity on M1 because s2 swaps symbols.
    fn flip() -> TauSpec {
        TauSpec::new(2, 1, 1, |l, x| {
            if l.generator() != 1 {
                return Ok(Word::letter(l));
            }
            let here = x.value(&Word::identity())?;
            let turn = if l.is_inverse() { here == 0 } else { here == 1 };
            Ok(Word::letter(if turn { l.inverse() } else { l }))
        })
    }

    #[test]
    fn identity_tau() {
        let tau = TauSpec::identity(2);
        let spec = m1();
        assert!(check_involution(&tau, &spec).unwrap().passed);
        let sampler = Sampler::new(&spec, 5).unwrap();
        let x = sampler.sample(0);
        for g in ball(2, 3).unwrap().iter() {
            assert_eq!(omega(&tau, g, &x).unwrap(), *g);
        }
        let phi = sampler.sample(1).capture(ball(2, 2).unwrap().iter());
        assert_eq!(apply_omega_map(&tau, &phi, 2).unwrap(), phi);
        for r in 0..4 {
            assert_eq!(dependency_radius(&tau, r), r);
        }
        for l in Letter::all(2) {
            assert!(check_past_preservation(&tau, &spec, l, 2).unwrap().passed);
        }
        assert!(check_inverse_pair(&tau, &tau, &spec, 2, 10, 1).unwrap().passed);
    }

    #[test]
    fn broken_rule_is_caught() {
        let c = check_involution(&broken(), &m1()).unwrap();
        assert!(!c.passed);
        assert!(c.witness.unwrap().contains("s1.s2"));
    }

    #[test]
    fn flip_rule_properties() {
        let tau = flip();
        let spec = m1();
        assert!(check_involution(&tau, &spec).unwrap().passed);
        let sampler = Sampler::new(&spec, 11).unwrap();
        for i in 0..50 {
            let x = sampler.sample(i);
            let table = CocycleTable::new(&tau, &x);
            // cocycle identity for |g| + |h| <= 4
            for g in ball(2, 2).unwrap().iter() {
                for h in ball(2, 2).unwrap().iter() {
                    let gh = g.multiply(h);
                    let hx = Shifted::new(&x, omega(&tau, h, &x).unwrap());
                    let rhs = omega(&tau, g, &hx).unwrap().multiply(&omega(&tau, h, &x).unwrap());
                    assert_eq!(table.omega(&gh).unwrap(), rhs, "g={g} h={h}");
                }
            }
            // equivariance g·Ωx = Ω(g∗x)
            for g in ball(2, 2).unwrap().iter() {
                let gx = Shifted::new(&x, table.omega(g).unwrap());
                let moved = CocycleTable::new(&tau, &gx);
                for h in ball(2, 2).unwrap().iter() {
                    assert_eq!(table.value(&h.multiply(g)).unwrap(), moved.value(h).unwrap());
                }
            }
            // s⁻¹ ∗ (s ∗ x) = x
            for l in Letter::all(2) {
                let s = Word::letter(l);
                let there = omega(&tau, &s, &x).unwrap();
                let back = omega(&tau, &Word::letter(l.inverse()), &Shifted::new(&x, there.clone())).unwrap();
                assert!(back.multiply(&there).is_identity());
            }
        }
    }

    #[test]
    fn table_agrees_with_direct_omega_and_radius_is_sound() {
        let tau = flip();
        let spec = m1();
        let sampler = Sampler::new(&spec, 3).unwrap();
        for i in 0..20 {
            let x = sampler.sample(i);
            let r = 3;
            let captured = x.capture(ball(2, dependency_radius(&tau, r)).unwrap().iter());
            let lazy = CocycleTable::new(&tau, &x);
            let finite = apply_omega_map(&tau, &captured, r).unwrap();
            for (h, a) in finite.sorted() {
                assert_eq!(lazy.omega(h).unwrap(), omega(&tau, h, &x).unwrap());
                assert_eq!(lazy.value(h).unwrap(), a);
            }
        }
        let tiny = Configuration::from_pairs([(Word::identity(), 0)]);
        assert!(matches!(apply_omega_map(&tau, &tiny, 1), Err(Error::MissingCoordinate(_))));
    }

    #[test]
    fn star_translates() {
        let tau = flip();
        let phi = sample_phi();
        let moved = star(&tau, &w("s2"), &phi).unwrap();
        let target = omega(&tau, &w("s2"), &phi).unwrap();
        for (g, a) in moved.sorted() {
            assert_eq!(phi.get(&g.multiply(&target)), Some(a));
        }
    }

    fn sample_phi() -> Configuration {
        let sampler = Sampler::new(&m1(), 8).unwrap();
        sampler.sample(0).capture(ball(2, 2).unwrap().iter())
    }

    #[test]
    fn public_checks_pass_for_flip_and_catch_a_broken_rule() {
        let spec = m1();
        let tau = flip();
        assert!(check_cocycle_identity(&tau, &spec, 4, 20, 1).unwrap().passed);
        assert!(check_equivariance(&tau, &spec, 2, 20, 1).unwrap().passed);
        assert!(check_omega_involution(&TauSpec::identity(2), &spec, 2, 5, 1).unwrap().passed);

        // turning on both orientations is not an involution
        let broken = TauSpec::new(2, 1, 1, |l, x| {
            let turn = l.generator() == 1 && x.value(&Word::identity())? == 1;
            Ok(Word::letter(if turn { l.inverse() } else { l }))
        });
        assert!(!check_involution(&broken, &spec).unwrap().passed);
    }
}
