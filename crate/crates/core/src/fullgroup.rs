//! The full-group half of the construction at desk scale.
//!
//! On a single finite cycle `T(i) = i + 1 mod N` the greedy matcher builds
//! `S` in the full group with `ψ = φ ∘ S`, and composing with a given orbit
//! equivalence makes it label preserving. On `ℤ`-sequences an orbit
//! equivalence `Ψ` is supplied as an [`OEOracle`] that moves each point
//! along its own orbit, `Ψy = T^{c(y)} y`, and the cocycles
//!
//! ```text
//! T^{β(n,y)} y = T̃ⁿ y,   T̃ = Ψ⁻¹ T Ψ
//! T̃^{α(n,y)} y = Tⁿ y
//! T^{β̂(n,y)} y = T̂ⁿ y,   T̂ = Ψ T Ψ⁻¹
//! ```
//!
//! feed the rewrite `τ(t^{±1}, x) = t^{β(±1, Rx)}` on the free group.
//!
//! Dye's theorem itself is not constructive, so nothing here produces an
//! orbit equivalence onto a Bernoulli restriction. The measure-level
//! sequence of the main theorem is exact; the map level is
//! oracle-dependent.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::chainspec::{rational, Kernel, MarkovSpec, Missing, Symbol, Window, ZKernel};
use crate::check::Check;
use crate::cocycle::{check_involution, omega, CocycleTable, TauSpec};
use crate::error::Error;
use crate::freegroup::{Letter, Word};
use crate::graphs::{classify, classify_generator, support_edges};

/// Status of the map-level orbit equivalence for the Dye step.
pub const MAP_LEVEL: &str = "oracle-dependent";

/// A bijection of `0..N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, Error> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Mismatch(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// `x ↦ x + k mod N`.
    pub fn rotation(n: usize, k: i64) -> Self {
        Permutation((0..n).map(|i| (i as i64 + k).rem_euclid(n as i64) as usize).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "composing permutations of different sizes");
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// Cycles, each starting at its smallest element, ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut i = self.0[start];
            while i != start {
                seen[i] = true;
                cycle.push(i);
                i = self.0[i];
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.cycles() {
            let inner: Vec<String> = c.iter().map(usize::to_string).collect();
            write!(f, "({})", inner.join(" "))?;
        }
        Ok(())
    }
}

/// The offsets `0, 1, −1, 2, −2, …` up to `±(n−1)`.
pub fn offsets(n: usize) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..n as i64).flat_map(|k| [k, -k]))
}

fn multiset<T: Ord + Clone>(labels: &[T]) -> BTreeMap<T, usize> {
    let mut m = BTreeMap::new();
    for l in labels {
        *m.entry(l.clone()).or_insert(0) += 1;
    }
    m
}

/// Greedy `S` in the full group of the cycle `0..N` with `ψ = φ ∘ S`.
///
/// Offsets are tried in the order of [`offsets`]; at offset `k` every
/// unmatched `x` with `ψ(x) = φ(x + k)` and `x + k` not yet hit is sent
/// there.
pub fn match_full_group<T: Ord + Clone + fmt::Debug>(phi: &[T], psi: &[T]) -> Result<Permutation, Error> {
    let n = phi.len();
    if psi.len() != n {
        return Err(Error::Mismatch(format!("label vectors of lengths {} and {}", n, psi.len())));
    }
    if multiset(phi) != multiset(psi) {
        return Err(Error::Precondition("phi and psi push the uniform measure to different laws".into()));
    }
    let mut image: Vec<Option<usize>> = vec![None; n];
    let mut hit = vec![false; n];
    for k in offsets(n) {
        for x in 0..n {
            let y = (x as i64 + k).rem_euclid(n as i64) as usize;
            if image[x].is_none() && !hit[y] && psi[x] == phi[y] {
                image[x] = Some(y);
                hit[y] = true;
            }
        }
    }
    let images = image
        .into_iter()
        .map(|y| y.expect("equal label counts leave nothing unmatched"))
        .collect();
    Permutation::new(images)
}

/// `Ψ = Ψ′ ∘ S` with `labels_b(Ψ(x)) = labels_a(x)` for every position.
pub fn label_preserving_oe<T: Ord + Clone + fmt::Debug>(
    labels_a: &[T],
    labels_b: &[T],
    psi_prime: &Permutation,
) -> Result<Permutation, Error> {
    if labels_a.len() != labels_b.len() || psi_prime.len() != labels_a.len() {
        return Err(Error::Mismatch("systems of different sizes".into()));
    }
    let pulled: Vec<T> = (0..labels_a.len()).map(|x| labels_b[psi_prime.apply(x)].clone()).collect();
    let s = match_full_group(&pulled, labels_a)?;
    Ok(psi_prime.compose(&s))
}

/// A `ℤ`-indexed sequence read one coordinate at a time.
pub trait Line {
    fn at(&self, k: i64) -> Result<Symbol, Missing>;
}

impl<L: Line + ?Sized> Line for &L {
    fn at(&self, k: i64) -> Result<Symbol, Missing> {
        (**self).at(k)
    }
}

/// `T^m y`.
pub struct ShiftedLine<L> {
    base: L,
    by: i64,
}

impl<L: Line> ShiftedLine<L> {
    pub fn new(base: L, by: i64) -> Self {
        ShiftedLine { base, by }
    }
}

impl<L: Line> Line for ShiftedLine<L> {
    fn at(&self, k: i64) -> Result<Symbol, Missing> {
        self.base.at(k + self.by)
    }
}

/// `Rx`, the restriction of a free-group configuration to the `t` axis.
pub struct Axis<'a> {
    x: &'a dyn Window,
    t: Letter,
}

impl<'a> Axis<'a> {
    pub fn new(x: &'a dyn Window, t: usize) -> Self {
        Axis { x, t: Letter::gen(t) }
    }
}

impl Line for Axis<'_> {
    fn at(&self, k: i64) -> Result<Symbol, Missing> {
        self.x.value(&Word::power(self.t, k))
    }
}

/// An eventually periodic sequence: `left` repeats forever to the left of
/// `middle`, `right` forever to its right, and `middle[0]` sits at
/// `origin`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZPoint {
    left: Vec<Symbol>,
    middle: Vec<Symbol>,
    right: Vec<Symbol>,
    origin: i64,
}

impl ZPoint {
    pub fn new(left: Vec<Symbol>, middle: Vec<Symbol>, right: Vec<Symbol>, origin: i64) -> Result<Self, Error> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::Mismatch("tails of a ZPoint need a non-empty period".into()));
        }
        Ok(ZPoint {
            left,
            middle,
            right,
            origin,
        })
    }

    pub fn periodic(period: Vec<Symbol>) -> Result<Self, Error> {
        ZPoint::new(period.clone(), Vec::new(), period, 0)
    }

    pub fn get(&self, k: i64) -> Symbol {
        let i = k - self.origin;
        let m = self.middle.len() as i64;
        if i < 0 {
            let p = self.left.len() as i64;
            self.left[(i.rem_euclid(p)) as usize]
        } else if i < m {
            self.middle[i as usize]
        } else {
            let p = self.right.len() as i64;
            self.right[((i - m).rem_euclid(p)) as usize]
        }
    }

    /// `T^m y`.
    pub fn shift(&self, m: i64) -> ZPoint {
        ZPoint {
            origin: self.origin - m,
            ..self.clone()
        }
    }

    /// `x_g = y_{σ_t(g)}` with `σ_t` the exponent sum of `t`, so that
    /// `R^t x = y`.
    pub fn embed(&self, t: usize) -> AxisEmbedding<'_> {
        AxisEmbedding { y: self, t }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.left.iter().chain(&self.middle).chain(&self.right).copied().collect()
    }
}

impl Line for ZPoint {
    fn at(&self, k: i64) -> Result<Symbol, Missing> {
        Ok(self.get(k))
    }
}

pub struct AxisEmbedding<'a> {
    y: &'a ZPoint,
    t: usize,
}

impl Window for AxisEmbedding<'_> {
    fn value(&self, g: &Word) -> Result<Symbol, Missing> {
        Ok(self.y.get(g.exponent_sum(self.t)))
    }
}

/// An orbit equivalence of `ℤ`-sequences that moves each point along its
/// own orbit, `Ψy = T^{c(y)} y`, with `c` read from a finite window.
pub trait OEOracle: Send + Sync {
    /// `c(y)`, reading `y` only on `[−lookahead, lookahead]`.
    fn displacement(&self, y: &dyn Line) -> Result<i64, Missing>;

    fn lookahead(&self) -> Option<usize>;

    /// Bound on `|c|`.
    fn max_displacement(&self) -> usize;

    fn name(&self) -> String;

    /// `S(p)`, the orbit position of `Ψ(T^p y)`.
    fn position(&self, y: &dyn Line, p: i64) -> Result<i64, Missing> {
        Ok(p + self.displacement(&ShiftedLine::new(y, p))?)
    }

    /// `S⁻¹(q)`.
    fn preimage(&self, y: &dyn Line, q: i64) -> Result<i64, Missing> {
        let d = self.max_displacement() as i64;
        for p in q - d..=q + d {
            if self.position(y, p)? == q {
                return Ok(p);
            }
        }
        panic!("oracle {} is not a bijection on the orbit near {q}", self.name());
    }

    fn alpha(&self, n: i64, y: &dyn Line) -> Result<i64, Missing> {
        Ok(self.position(y, n)? - self.position(y, 0)?)
    }

    fn beta(&self, n: i64, y: &dyn Line) -> Result<i64, Missing> {
        let s0 = self.position(y, 0)?;
        self.preimage(y, s0 + n)
    }

    fn beta_hat(&self, n: i64, y: &dyn Line) -> Result<i64, Missing> {
        let back = self.preimage(y, 0)?;
        self.position(y, back + n)
    }
}

/// `Ψ = id`.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityOracle;

impl OEOracle for IdentityOracle {
    fn displacement(&self, _: &dyn Line) -> Result<i64, Missing> {
        Ok(0)
    }
    fn lookahead(&self) -> Option<usize> {
        Some(0)
    }
    fn max_displacement(&self) -> usize {
        0
    }
    fn name(&self) -> String {
        "identity".into()
    }
}

/// Swaps the coordinates `at` and `at + 1` of every occurrence of an
/// unbordered `pattern`. Occurrences of an unbordered word never overlap,
/// so the swaps commute and the map is an involutive element of the full
/// group with `c ∈ {−1, 0, 1}`.
#[derive(Clone, Debug)]
pub struct MarkerSwap {
    pattern: Vec<Symbol>,
    at: usize,
}

impl MarkerSwap {
    pub fn new(pattern: Vec<Symbol>, at: usize) -> Result<Self, Error> {
        if at + 1 >= pattern.len() {
            return Err(Error::Precondition("swap position must lie inside the pattern".into()));
        }
        if (1..pattern.len()).any(|k| pattern[..k] == pattern[pattern.len() - k..]) {
            return Err(Error::Precondition(format!("pattern {pattern:?} has a border")));
        }
        Ok(MarkerSwap { pattern, at })
    }

    /// `[m, a, a]` swapping the two `a`s, so labels are preserved.
    pub fn label_preserving(marker: Symbol, a: Symbol) -> Result<Self, Error> {
        MarkerSwap::new(vec![marker, a, a], 1)
    }

    fn occurs_at(&self, y: &dyn Line, start: i64) -> Result<bool, Missing> {
        for (i, &s) in self.pattern.iter().enumerate() {
            if y.at(start + i as i64)? != s {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl OEOracle for MarkerSwap {
    fn displacement(&self, y: &dyn Line) -> Result<i64, Missing> {
        let at = self.at as i64;
        if self.occurs_at(y, -at)? {
            Ok(1)
        } else if self.occurs_at(y, -at - 1)? {
            Ok(-1)
        } else {
            Ok(0)
        }
    }
    fn lookahead(&self) -> Option<usize> {
        Some(self.pattern.len())
    }
    fn max_displacement(&self) -> usize {
        1
    }
    fn name(&self) -> String {
        format!("marker swap {:?} at {}", self.pattern, self.at)
    }
}

/// `Ψ⁻¹` for a given oracle: `c′(y) = S⁻¹(0)`.
#[derive(Clone)]
pub struct InverseOracle(pub Arc<dyn OEOracle>);

impl OEOracle for InverseOracle {
    fn displacement(&self, y: &dyn Line) -> Result<i64, Missing> {
        self.0.preimage(y, 0)
    }
    fn lookahead(&self) -> Option<usize> {
        self.0.lookahead().map(|la| la + self.0.max_displacement())
    }
    fn max_displacement(&self) -> usize {
        self.0.max_displacement()
    }
    fn name(&self) -> String {
        format!("inverse of {}", self.0.name())
    }
}

/// `Ψy`.
pub fn forward(oracle: &dyn OEOracle, y: &ZPoint) -> ZPoint {
    let c = oracle.displacement(y).expect("ZPoint is total");
    y.shift(c)
}

/// `Ψ⁻¹y`.
pub fn backward(oracle: &dyn OEOracle, y: &ZPoint) -> ZPoint {
    let c = oracle.preimage(y, 0).expect("ZPoint is total");
    y.shift(c)
}

/// The cocycle identities (b1)–(b5) on every test point for `|n|, |m| ≤
/// range`.
pub fn cocycle_check(oracle: &dyn OEOracle, points: &[ZPoint], range: i64) -> Vec<Check> {
    let total = |r: Result<i64, Missing>| r.expect("ZPoint is total");
    let mut b1 = None;
    let mut b2 = None;
    let mut b3 = None;
    let mut b4 = None;
    let mut b5 = None;
    for (i, y) in points.iter().enumerate() {
        let at = |what: &str, n: i64, m: Option<i64>| match m {
            Some(m) => format!("point {i}, n = {n}, m = {m}: {what}"),
            None => format!("point {i}, n = {n}: {what}"),
        };
        for n in -range..=range {
            if b3.is_none() {
                let ba = total(oracle.beta(total(oracle.alpha(n, y)), y));
                let ab = total(oracle.alpha(total(oracle.beta(n, y)), y));
                if ba != n || ab != n {
                    b3 = Some(at(&format!("beta(alpha(n)) = {ba}, alpha(beta(n)) = {ab}"), n, None));
                }
            }
            if b5.is_none() {
                let left = total(oracle.beta(n, &backward(oracle, y)));
                let left = total(oracle.beta_hat(left, y));
                let right = total(oracle.beta_hat(n, &forward(oracle, y)));
                let right = total(oracle.beta(right, y));
                if left != n || right != n {
                    b5 = Some(at(&format!("got {left} and {right}"), n, None));
                }
            }
            for m in -range..=range {
                let am = total(oracle.alpha(m, y));
                if b1.is_none() && total(oracle.alpha(n + m, y)) != total(oracle.alpha(n, &y.shift(m))) + am {
                    b1 = Some(at("alpha is not a cocycle", n, Some(m)));
                }
                let bm = total(oracle.beta(m, y));
                if b2.is_none() && total(oracle.beta(n + m, y)) != total(oracle.beta(n, &y.shift(bm))) + bm {
                    b2 = Some(at("beta is not a cocycle", n, Some(m)));
                }
                let hm = total(oracle.beta_hat(m, y));
                if b4.is_none() && total(oracle.beta_hat(n + m, y)) != total(oracle.beta_hat(n, &y.shift(hm))) + hm {
                    b4 = Some(at("beta-hat is not a cocycle", n, Some(m)));
                }
            }
        }
    }
    vec![
        Check::from_witness("(b1) alpha cocycle", b1),
        Check::from_witness("(b2) beta cocycle", b2),
        Check::from_witness("(b3) alpha and beta are inverse", b3),
        Check::from_witness("(b4) beta-hat cocycle", b4),
        Check::from_witness("(b5) beta and beta-hat are inverse", b5),
    ]
}

/// `τ(t^{±1}, x) = t^{β(±1, Rx)}` and `τ(s, x) = s` otherwise.
pub fn build_dye_tau(oracle: Arc<dyn OEOracle>, rank: usize, t: usize) -> Result<TauSpec, Error> {
    if t >= rank {
        return Err(Error::UnknownGenerator(t));
    }
    let la = oracle.lookahead().ok_or(Error::UnboundedOracle)?;
    let d = oracle.max_displacement();
    let tl = Letter::gen(t);
    let rule = move |l: Letter, x: &dyn Window| -> Result<Word, Missing> {
        if l.generator() != t {
            return Ok(Word::letter(l));
        }
        let n = oracle.beta(l.sign() as i64, &Axis::new(x, t))?;
        Ok(Word::power(tl, n))
    };
    Ok(TauSpec::new(rank, 2 * d + 1 + la, 2 * d + 1, rule))
}

/// `tⁿ ∗ x = t^{β(n, Rx)} · x` for `|n| ≤ range` on the embedded test points.
pub fn check_o4(oracle: &dyn OEOracle, tau: &TauSpec, t: usize, points: &[ZPoint], range: i64) -> Check {
    let tl = Letter::gen(t);
    let mut witness = None;
    'outer: for (i, y) in points.iter().enumerate() {
        let x = y.embed(t);
        for n in -range..=range {
            let lhs = omega(tau, &Word::power(tl, n), &x).expect("embedding is total");
            let b = oracle.beta(n, y).expect("ZPoint is total");
            if lhs != Word::power(tl, b) {
                witness = Some(format!("point {i}, n = {n}: omega = {lhs}, beta = {b}"));
                break 'outer;
            }
        }
    }
    Check::from_witness("(o4) powers of t act through beta", witness)
}

/// `R Ω = Ψ R` and `R Ω̂ = Ψ⁻¹ R` on the embedded test points, compared on
/// `[−range, range]`.
pub fn check_r1(oracle: Arc<dyn OEOracle>, rank: usize, t: usize, points: &[ZPoint], range: i64) -> Result<Check, Error> {
    let tau = build_dye_tau(oracle.clone(), rank, t)?;
    let tau_hat = build_dye_tau(Arc::new(InverseOracle(oracle.clone())), rank, t)?;
    let tl = Letter::gen(t);
    for (i, y) in points.iter().enumerate() {
        let x = y.embed(t);
        for (name, tau, target) in [
            ("R Omega = Psi R", &tau, forward(oracle.as_ref(), y)),
            ("R Omega-hat = Psi^-1 R", &tau_hat, backward(oracle.as_ref(), y)),
        ] {
            let recoded = CocycleTable::new(tau, &x);
            for n in -range..=range {
                let got = recoded.value(&Word::power(tl, n)).expect("embedding is total");
                if got != target.get(n) {
                    return Ok(Check::fail(
                        "(R1) restriction equations",
                        format!("{name} fails at point {i}, coordinate {n}"),
                    ));
                }
            }
        }
    }
    Ok(Check::pass("(R1) restriction equations"))
}

/// All checks for one oracle: the cocycle identities, (o4), (R1) when the
/// oracle preserves labels on the test points, and involutivity of `τ`
/// against `spec`.
pub fn dye_checks(
    oracle: Arc<dyn OEOracle>,
    spec: &MarkovSpec,
    t: usize,
    points: &[ZPoint],
    range: i64,
) -> Result<Vec<Check>, Error> {
    let mut checks = cocycle_check(oracle.as_ref(), points, range);
    let tau = build_dye_tau(oracle.clone(), spec.rank(), t)?;
    checks.push(check_involution(&tau, spec)?);
    checks.push(check_o4(oracle.as_ref(), &tau, t, points, range));
    let preserving = points
        .iter()
        .all(|y| (-range - 2..=range + 2).all(|n| forward(oracle.as_ref(), &y.shift(n)).get(0) == y.get(n)));
    if preserving {
        checks.push(check_r1(oracle, spec.rank(), t, points, range)?);
    }
    Ok(checks)
}

/// Replaces `P_t` by `new_kernel` after checking that it has the same
/// stationary distribution and is ergodic and essentially free.
pub fn swap_restriction(spec: &MarkovSpec, t: usize, new_kernel: &ZKernel) -> Result<MarkovSpec, Error> {
    if t >= spec.rank() {
        return Err(Error::UnknownGenerator(t));
    }
    if new_kernel.pi != spec.pi() {
        return Err(Error::Precondition("new restriction has a different one-site law".into()));
    }
    let candidate = spec.with_kernel(t, new_kernel.kernel.clone())?;
    let g = classify_generator(&support_edges(&candidate, t)?);
    if !g.ergodic || !g.free {
        return Err(Error::Precondition("new restriction must be ergodic and essentially free".into()));
    }
    Ok(candidate)
}

/// `μ⁽⁰⁾ = spec, …, μ⁽ʳ⁾` where step `i` swaps the kernel of `s_i` for the
/// Bernoulli kernel with rows `π`.
pub fn bernoullization_sequence(spec: &MarkovSpec) -> Result<Vec<MarkovSpec>, Error> {
    crate::chainspec::require_valid(spec)?;
    if !classify(spec)?.generator_ergodic() {
        return Err(Error::Precondition("every generator restriction must be ergodic and free".into()));
    }
    let nu = ZKernel::new(spec.pi().to_vec(), Kernel::constant_rows(spec.pi()))?;
    let mut out = vec![spec.clone()];
    for t in 0..spec.rank() {
        let next = swap_restriction(out.last().expect("non-empty"), t, &nu)?;
        out.push(next);
    }
    Ok(out)
}

/// Measure-level outcome of the main theorem's last step.
#[derive(Clone, Debug, Serialize)]
pub struct BernoullizationReport {
    pub stages: usize,
    pub final_is_bernoulli: bool,
    pub map_level: &'static str,
    pub note: &'static str,
    pub checks: Vec<Check>,
}

pub fn bernoullization_report(spec: &MarkovSpec, stages: &[MarkovSpec]) -> BernoullizationReport {
    let target = crate::chainspec::bernoulli_spec(spec.alphabet().to_vec(), spec.pi().to_vec(), spec.rank());
    let last = stages.last();
    let final_is_bernoulli = matches!((&target, last), (Ok(b), Some(l)) if b == l);
    let invalid = stages
        .iter()
        .position(|s| !crate::chainspec::validate(s).is_valid())
        .map(|i| format!("stage {i} is not a valid spec"));
    let moved = stages
        .iter()
        .position(|s| s.pi() != spec.pi())
        .map(|i| format!("stage {i} changes the one-site law"));
    let len = (stages.len() != spec.rank() + 1).then(|| format!("{} stages for rank {}", stages.len(), spec.rank()));
    BernoullizationReport {
        stages: stages.len(),
        final_is_bernoulli,
        map_level: MAP_LEVEL,
        note: "each step needs an orbit equivalence from Dye's theorem, which has no finite-window construction; \
               the map is checked only for the supplied oracles",
        checks: vec![
            Check::from_witness("every stage validates", invalid),
            Check::from_witness("one-site law unchanged", moved),
            Check::from_witness("one stage per generator", len),
            Check::from_witness(
                "final stage is the Bernoulli spec",
                (!final_is_bernoulli).then(|| "final stage differs from the Bernoulli spec".to_string()),
            ),
        ],
    }
}

/// A permutation as JSON: images and cycle notation.
pub fn permutation_json(p: &Permutation) -> serde_json::Value {
    serde_json::json!({ "images": p.images(), "cycles": p.to_string() })
}

/// The exact kernel swapped in at each stage, for reports.
pub fn stage_kernels(stages: &[MarkovSpec]) -> Vec<Vec<Vec<String>>> {
    stages
        .windows(2)
        .enumerate()
        .map(|(t, w)| {
            w[1].kernels()[t]
                .rows()
                .iter()
                .map(|r| r.iter().map(rational::format).collect())
                .collect()
        })
        .collect()
}
