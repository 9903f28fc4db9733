//! Edge sliding: recode generator `t` as `ut` or `u⁻¹t` near flagged edges
//! of the `u`-chain, which copies those edges into the support of the
//! `t`-chain without touching any other restriction.
//!
//! For a special edge set `𝓔` of the `u`-graph, `F(x) = (x_{u⁻¹}, x_e,
//! x_{u^{n(x_e)}})` is defined when `(x_{u⁻¹}, x_e) ∈ 𝓔`, and `𝓕` collects the
//! triples `(a, b, η(b))`. Then
//!
//! ```text
//! τ(t, x)  = ut      if F(ut·x) ∈ 𝓕,   u⁻¹t  if F(t·x) ∈ 𝓕,   t   otherwise
//! τ(t⁻¹, x) = t⁻¹u⁻¹ if F(x) ∈ 𝓕,      t⁻¹u  if F(u·x) ∈ 𝓕,   t⁻¹ otherwise
//! ```
//!
//! and `τ(s, x) = s` for every other letter.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::chainspec::{
    cylinder_measure_with, rational, require_valid, Configuration, Enumerator, Kernel, MarkovSpec, Missing, Rational,
    Sampler, Shifted, Symbol, Window,
};
use crate::check::Check;
use crate::cocycle::{check_involution, CocycleTable, TauSpec};
use crate::error::Error;
use crate::freegroup::{ball, Letter, LeftConnectedSet, Word};
use crate::graphs::{
    branch_data, classes, classify, is_periodic_class, special_sets, special_violation, support_edges, BranchData,
    TransitionGraph,
};

/// The data of one edge slide.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlideParams {
    pub u: usize,
    pub t: usize,
    pub edges: Vec<(Symbol, Symbol)>,
    pub eta: BTreeMap<Symbol, BranchData>,
}

impl SlideParams {
    /// Validates `u ≠ t` and specialness of `edges` in the `u`-graph of
    /// `spec`, and attaches branch data to every target.
    pub fn new(spec: &MarkovSpec, u: usize, t: usize, edges: Vec<(Symbol, Symbol)>) -> Result<Self, Error> {
        if u >= spec.rank() {
            return Err(Error::UnknownGenerator(u));
        }
        if t >= spec.rank() {
            return Err(Error::UnknownGenerator(t));
        }
        if u == t {
            return Err(Error::Precondition("u and t must be distinct".into()));
        }
        let mut edges = edges;
        edges.sort();
        edges.dedup();
        let graph = support_edges(spec, u)?;
        if let Some(why) = special_violation(&graph, &edges)? {
            let params = SlideParams::unchecked(&graph, u, t, edges.clone());
            let conflict = params
                .ok()
                .and_then(|p| find_conflict(&p, spec.rank(), spec.symbol_count()).ok().flatten());
            let detail = match conflict {
                Some(phi) => format!("{why}; tau is ill-defined on window {phi:?}"),
                None => why,
            };
            return Err(Error::NotSpecial(detail));
        }
        SlideParams::unchecked(&graph, u, t, edges)
    }

    /// Branch data without the specialness check, for probing what goes
    /// wrong on non-special sets.
    pub fn unchecked(
        u_graph: &TransitionGraph,
        u: usize,
        t: usize,
        edges: Vec<(Symbol, Symbol)>,
    ) -> Result<Self, Error> {
        let mut eta = BTreeMap::new();
        for &(_, b) in &edges {
            if let std::collections::btree_map::Entry::Vacant(slot) = eta.entry(b) {
                slot.insert(branch_data(u_graph, b)?);
            }
        }
        Ok(SlideParams { u, t, edges, eta })
    }

    /// `𝓕 = {(a, b, η(b)) : (a, b) ∈ 𝓔}`.
    pub fn f_set(&self) -> Vec<(Symbol, Symbol, Symbol)> {
        self.edges.iter().map(|&(a, b)| (a, b, self.eta[&b].eta)).collect()
    }

    pub fn n_max(&self) -> usize {
        self.eta.values().map(|d| d.n).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The rewrite `τ` of this slide.
    pub fn tau(&self, rank: usize) -> TauSpec {
        if self.is_empty() {
            return TauSpec::identity(rank);
        }
        let rule = SlideRule::new(self);
        TauSpec::new(rank, self.n_max() + 2, 2, move |l, x| rule.rewrite(l, x))
    }
}

#[derive(Clone)]
struct SlideRule {
    u: Letter,
    t: Letter,
    edges: Arc<HashSet<(Symbol, Symbol)>>,
    targets: Arc<BTreeMap<Symbol, (usize, Symbol)>>,
}

impl SlideRule {
    fn new(p: &SlideParams) -> Self {
        SlideRule {
            u: Letter::gen(p.u),
            t: Letter::gen(p.t),
            edges: Arc::new(p.edges.iter().copied().collect()),
            targets: Arc::new(p.eta.iter().map(|(&b, d)| (b, (d.n, d.eta))).collect()),
        }
    }

    fn in_f(&self, x: &dyn Window) -> Result<bool, Missing> {
        let b = x.value(&Word::identity())?;
        let Some(&(n, eta)) = self.targets.get(&b) else {
            return Ok(false);
        };
        let a = x.value(&Word::letter(self.u.inverse()))?;
        if !self.edges.contains(&(a, b)) {
            return Ok(false);
        }
        Ok(x.value(&Word::power(self.u, n as i64))? == eta)
    }

    fn rewrite(&self, l: Letter, x: &dyn Window) -> Result<Word, Missing> {
        let (u, t) = (self.u, self.t);
        if l == t {
            if self.in_f(&Shifted::new(x, Word::reduce([u, t])))? {
                return Ok(Word::reduce([u, t]));
            }
            if self.in_f(&Shifted::new(x, Word::letter(t)))? {
                return Ok(Word::reduce([u.inverse(), t]));
            }
        } else if l == t.inverse() {
            if self.in_f(x)? {
                return Ok(Word::reduce([t.inverse(), u.inverse()]));
            }
            if self.in_f(&Shifted::new(x, Word::letter(u)))? {
                return Ok(Word::reduce([t.inverse(), u]));
            }
        }
        Ok(Word::letter(l))
    }
}

/// `F(x)` when `(x_{u⁻¹}, x_e) ∈ 𝓔`.
pub fn eval_f<W: Window + ?Sized>(x: &W, params: &SlideParams) -> Result<Option<(Symbol, Symbol, Symbol)>, Missing> {
    let u = Letter::gen(params.u);
    let b = x.value(&Word::identity())?;
    let Some(d) = params.eta.get(&b) else {
        return Ok(None);
    };
    let a = x.value(&Word::letter(u.inverse()))?;
    if !params.edges.contains(&(a, b)) {
        return Ok(None);
    }
    Ok(Some((a, b, x.value(&Word::power(u, d.n as i64))?)))
}

/// A window on which both alternatives of one of the `τ` displays fire,
/// searched over all configurations.
pub fn find_conflict(params: &SlideParams, rank: usize, symbols: usize) -> Result<Option<Configuration>, Error> {
    let rule = SlideRule::new(params);
    let (u, t) = (rule.u, rule.t);
    let explorer = Enumerator::unweighted(symbols);
    let both = |x: &Configuration| -> Result<bool, Missing> {
        let a = rule.in_f(&Shifted::new(x, Word::reduce([u, t])))?;
        let b = rule.in_f(&Shifted::new(x, Word::letter(t)))?;
        let c = rule.in_f(x)?;
        let d = rule.in_f(&Shifted::new(x, Word::letter(u)))?;
        Ok(!(a && b) && !(c && d))
    };
    let _ = rank;
    explorer.counterexample(Configuration::new(), both)
}

/// Validates `params` against `spec` and returns the slide's `τ`.
pub fn build_tau(spec: &MarkovSpec, params: &SlideParams) -> Result<TauSpec, Error> {
    let checked = SlideParams::new(spec, params.u, params.t, params.edges.clone())?;
    if checked.eta != params.eta {
        return Err(Error::Mismatch("branch data does not match the spec".into()));
    }
    Ok(checked.tau(spec.rank()))
}

/// The exact law of `((Ωx)_e, (Ωx)_t) = (x_e, x_{τ(t, x)})` under `μ`.
pub fn pushforward_joint(spec: &MarkovSpec, params: &SlideParams) -> Result<Vec<Vec<Rational>>, Error> {
    let kernels = spec.letter_kernels()?;
    let tau = params.tau(spec.rank());
    let t = Letter::gen(params.t);
    let n = spec.symbol_count();
    let mut joint = vec![vec![Rational::zero(); n]; n];
    let law = Enumerator::weighted(&kernels).distribution(|x| {
        let step = tau.rewrite(t, x)?;
        Ok((x.value(&Word::identity())?, x.value(&step)?))
    })?;
    for ((a, b), p) in law {
        joint[a][b] += p;
    }
    Ok(joint)
}

/// `ρ = Ω_*μ`: every kernel but `P_t` is unchanged, and
/// `Q_t(a, b) = ρ(y_e = a, y_t = b) / π(a)`.
pub fn pushforward(spec: &MarkovSpec, params: &SlideParams) -> Result<MarkovSpec, Error> {
    require_valid(spec)?;
    if params.is_empty() {
        return Ok(spec.clone());
    }
    let joint = pushforward_joint(spec, params)?;
    let rows = joint
        .into_iter()
        .enumerate()
        .map(|(a, row)| row.into_iter().map(|p| p / &spec.pi()[a]).collect())
        .collect();
    spec.with_kernel(params.t, Kernel::new(rows)?)
}

/// Support pairs the slid chain must contain: `E_t` and every `(α, b)`
/// with `(α, a) ∈ E_t` and `(a, b) ∈ 𝓔`.
pub fn required_support(spec: &MarkovSpec, params: &SlideParams) -> Result<BTreeSet<(Symbol, Symbol)>, Error> {
    let et = support_edges(spec, params.t)?;
    let mut out: BTreeSet<_> = et.edges().clone();
    for &(alpha, a) in et.edges() {
        for &(a2, b) in &params.edges {
            if a == a2 {
                out.insert((alpha, b));
            }
        }
    }
    Ok(out)
}

/// Outcome of [`verify_slide`].
#[derive(Clone, Debug, Serialize)]
pub struct SlideReport {
    pub u: String,
    pub t: String,
    pub edges: Vec<(String, String)>,
    pub q_t: Vec<Vec<String>>,
    pub markov_domain: Vec<String>,
    pub checks: Vec<Check>,
}

impl SlideReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub samples: u64,
    pub seed: u64,
    /// Leaf budget for the exact Markov check on the ball of radius two
    /// before falling back to smaller domains.
    pub markov_budget: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 200,
            seed: 0,
            markov_budget: 400_000,
        }
    }
}

/// Domains for the exact Markov check, largest first: the ball of radius
/// two, then the unit ball with every two-letter word ending in `t`, then
/// the unit ball.
fn markov_domains(rank: usize, t: usize) -> Result<Vec<LeftConnectedSet>, Error> {
    let b1 = ball(rank, 1)?;
    let tw = Word::letter(Letter::gen(t));
    let mut mid: Vec<Word> = b1.elements().to_vec();
    for l in Letter::all(rank) {
        if l != Letter::inv(t) {
            mid.push(tw.left_mul(l));
        }
    }
    Ok(vec![ball(rank, 2)?, LeftConnectedSet::new(mid)?, b1])
}

/// Outcomes on a domain, in domain order, with their exact masses.
type Law = Vec<(Vec<Symbol>, Rational)>;

/// The exact law of `Ωx` on a left-connected domain, or `None` once the
/// leaf budget runs out.
fn pushforward_law(
    spec: &MarkovSpec,
    tau: &TauSpec,
    domain: &LeftConnectedSet,
    budget: usize,
) -> Result<Option<Law>, Error> {
    let kernels = spec.letter_kernels()?;
    let words = domain.elements();
    let law = Enumerator::weighted(&kernels).with_budget(budget).distribution(|x| {
        let table = CocycleTable::new(tau, x);
        words.iter().map(|h| table.value(h)).collect::<Result<Vec<Symbol>, Missing>>()
    });
    match law {
        Ok(law) => Ok(Some(law)),
        Err(Error::EnumerationBudget(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// First cylinder whose mass under `law` differs from the cylinder formula
/// with `rho`'s kernels.
fn kernel_mismatch(
    rho: &MarkovSpec,
    domain: &LeftConnectedSet,
    law: &[(Vec<Symbol>, Rational)],
) -> Result<Option<String>, Error> {
    let rho_kernels = rho.letter_kernels()?;
    let mut total = Rational::zero();
    for (values, mass) in law {
        let phi = Configuration::on(domain, values)?;
        let predicted = cylinder_measure_with(&rho_kernels, &phi)?;
        if &predicted != mass {
            return Ok(Some(format!(
                "cylinder {phi:?}: pushforward {} but kernels give {}",
                rational::format(mass),
                rational::format(&predicted)
            )));
        }
        total += mass;
    }
    if !num_traits::One::is_one(&total) {
        return Ok(Some(format!("total mass {}", rational::format(&total))));
    }
    Ok(None)
}

/// First violation of `s`-Markovity visible in `law`: conditioned on the
/// root, the coordinates in `past(s)` must be independent of the others.
fn past_dependence(
    rho: &MarkovSpec,
    domain: &LeftConnectedSet,
    law: &[(Vec<Symbol>, Rational)],
    s: Letter,
) -> Result<Option<String>, Error> {
    let words = domain.elements();
    let root = words.iter().position(Word::is_identity).expect("domain contains e");
    let inside: Vec<usize> = (0..words.len()).filter(|&i| words[i].in_past(s)).collect();
    let outside: Vec<usize> = (0..words.len()).filter(|&i| !words[i].in_past(s)).collect();
    let pick = |v: &[Symbol], idx: &[usize]| -> Vec<Symbol> { idx.iter().map(|&i| v[i]).collect() };
    let mut joint: BTreeMap<(Vec<Symbol>, Vec<Symbol>), Rational> = BTreeMap::new();
    let mut m_in: BTreeMap<(Symbol, Vec<Symbol>), Rational> = BTreeMap::new();
    let mut m_out: BTreeMap<Vec<Symbol>, Rational> = BTreeMap::new();
    for (v, mass) in law {
        let (a, b) = (pick(v, &inside), pick(v, &outside));
        *m_in.entry((v[root], a.clone())).or_insert_with(Rational::zero) += mass;
        *m_out.entry(b.clone()).or_insert_with(Rational::zero) += mass;
        *joint.entry((a, b)).or_insert_with(Rational::zero) += mass;
    }
    let root_in_outside = outside.iter().position(|&i| i == root).expect("e is not in a past");
    for (b, mb) in &m_out {
        let a0 = b[root_in_outside];
        let pi = &rho.pi()[a0];
        for ((r, a), ma) in m_in.range((a0, Vec::new())..) {
            if *r != a0 {
                break;
            }
            let j = joint.get(&(a.clone(), b.clone())).cloned().unwrap_or_else(Rational::zero);
            if &j * pi != ma * mb {
                let mut values = vec![0; words.len()];
                for (k, &i) in inside.iter().enumerate() {
                    values[i] = a[k];
                }
                for (k, &i) in outside.iter().enumerate() {
                    values[i] = b[k];
                }
                let phi = Configuration::on(domain, &values)?;
                return Ok(Some(format!(
                    "cylinder {phi:?}: mass {} but the product of the two sides gives {}",
                    rational::format(&j),
                    rational::format(&(ma * mb / pi))
                )));
            }
        }
    }
    Ok(None)
}

/// Checks the conclusions of the slide lemma for `rho`, which should be the
/// pushforward of `spec` under the slide.
pub fn verify_slide_against(
    spec: &MarkovSpec,
    params: &SlideParams,
    rho: &MarkovSpec,
    opts: VerifyOptions,
) -> Result<SlideReport, Error> {
    require_valid(spec)?;
    let rank = spec.rank();
    let name = |a: Symbol| spec.alphabet()[a].clone();
    let tau = params.tau(rank);
    let mut checks = Vec::new();

    checks.push(check_involution(&tau, spec)?);

    let kernels = spec.letter_kernels()?;
    let sampler = Sampler::from_kernels(&kernels, opts.seed);
    let b2 = ball(rank, 2)?;
    let b4 = ball(rank, 4)?;
    let mut twice = None;
    let mut onto = None;
    for i in 0..opts.samples {
        let x = sampler.sample(i);
        let once = CocycleTable::new(&tau, &x);
        let back = CocycleTable::new(&tau, &once);
        if twice.is_none() {
            if let Some(h) = b2.iter().find(|h| back.value(h) != Ok(x.get(h))) {
                twice = Some(format!("sample {i} differs at {h}"));
            }
        }
        if onto.is_none() {
            let reached: HashSet<Word> = b4.iter().map(|h| once.omega(h)).collect::<Result<_, _>>()?;
            if let Some(g) = b2.iter().find(|g| !reached.contains(g)) {
                onto = Some(format!("sample {i}: no h of length <= 4 has omega(h) = {g}"));
            }
        }
    }
    checks.push(Check::from_witness("omega map is an involution", twice));
    checks.push(Check::from_witness("orbits are preserved", onto));

    let mut law = None;
    let mut markov_domain = Vec::new();
    for domain in markov_domains(rank, params.t)? {
        if let Some(found) = pushforward_law(spec, &tau, &domain, opts.markov_budget)? {
            markov_domain = domain.iter().map(|w| w.to_string()).collect();
            law = Some((domain, found));
            break;
        }
    }
    match &law {
        Some((domain, law)) => {
            let mut along = None;
            for s in (0..rank).filter(|&s| s != params.u) {
                along = past_dependence(rho, domain, law, Letter::gen(s))?;
                if let Some(w) = along {
                    along = Some(format!("s{}: {w}", s + 1));
                    break;
                }
            }
            checks.push(Check::from_witness("pushforward is s-Markov for every s other than u", along));
            checks.push(Check::from_witness(
                "pushforward is Markov with the reported kernels",
                kernel_mismatch(rho, domain, law)?,
            ));
        }
        None => {
            for name in [
                "pushforward is s-Markov for every s other than u",
                "pushforward is Markov with the reported kernels",
            ] {
                checks.push(Check::fail(name, "every domain exceeded the budget"));
            }
        }
    }

    let others = (0..rank)
        .filter(|&s| s != params.t)
        .find(|&s| spec.kernels()[s] != rho.kernels()[s])
        .map(|s| format!("kernel of s{} changed", s + 1));
    checks.push(Check::from_witness("other restrictions unchanged", others));

    let rho_t = support_edges(rho, params.t)?;
    let missing = required_support(spec, params)?
        .into_iter()
        .find(|&(a, b)| !rho_t.has_edge(a, b))
        .map(|(a, b)| format!("({}, {}) missing from the support of the new kernel", name(a), name(b)));
    checks.push(Check::from_witness("support contains slid edges", missing));

    let rho_classes = classes(&rho_t);
    let mu_t = support_edges(spec, params.t)?;
    let not_merged = params
        .edges
        .iter()
        .copied()
        .chain(mu_t.edges().iter().copied())
        .find(|&(a, b)| !rho_classes.same_class(a, b))
        .map(|(a, b)| format!("{} and {} are in different classes", name(a), name(b)));
    checks.push(Check::from_witness("relation contains slid edges", not_merged));

    let periodic = params
        .edges
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .find(|&a| is_periodic_class(&rho_t, rho_classes.class_of(a)))
        .map(|a| format!("class of {} is periodic", name(a)));
    checks.push(Check::from_witness("endpoint classes aperiodic", periodic));

    let valid = crate::chainspec::validate(rho);
    checks.push(Check::from_witness(
        "pushforward is a valid spec",
        valid.violations.first().map(|v| v.to_string()),
    ));

    Ok(SlideReport {
        u: format!("s{}", params.u + 1),
        t: format!("s{}", params.t + 1),
        edges: params.edges.iter().map(|&(a, b)| (name(a), name(b))).collect(),
        q_t: rho.kernels()[params.t]
            .rows()
            .iter()
            .map(|r| r.iter().map(rational::format).collect())
            .collect(),
        markov_domain,
        checks,
    })
}

pub fn verify_slide(spec: &MarkovSpec, params: &SlideParams, opts: VerifyOptions) -> Result<SlideReport, Error> {
    let rho = pushforward(spec, params)?;
    verify_slide_against(spec, params, &rho, opts)
}

/// Monte Carlo estimate of `ρ(y_e = a, y_t = b)`.
pub fn monte_carlo_joint(spec: &MarkovSpec, params: &SlideParams, samples: u64, seed: u64) -> Result<Vec<Vec<f64>>, Error> {
    let sampler = Sampler::new(spec, seed)?;
    let tau = params.tau(spec.rank());
    let t = Word::letter(Letter::gen(params.t));
    let n = spec.symbol_count();
    let mut counts = vec![vec![0u64; n]; n];
    for i in 0..samples {
        let x = sampler.sample(i);
        let y = CocycleTable::new(&tau, &x);
        counts[x.get(&Word::identity())][y.value(&t)?] += 1;
    }
    Ok(counts
        .into_iter()
        .map(|r| r.into_iter().map(|c| c as f64 / samples as f64).collect())
        .collect())
}

/// The measure reached by the pipeline and the slides that reach it.
#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub spec: MarkovSpec,
    pub slides: Vec<SlideParams>,
    /// Every intermediate measure, starting with the input.
    pub stages: Vec<MarkovSpec>,
}

/// Slides every tree edge set of an aperiodic class onto every other
/// generator until each restriction is ergodic and essentially free.
///
/// Stage one uses the first generator with an aperiodic class. Later rounds
/// take each generator in turn as `u` and slide the spanning trees of all
/// its aperiodic classes. Slides that leave the measure unchanged are
/// dropped; the run stops as soon as the target is reached.
pub fn generator_ergodic_pipeline(spec: &MarkovSpec) -> Result<PipelineOutput, Error> {
    require_valid(spec)?;
    let c = classify(spec)?;
    if !c.properly_ergodic {
        return Err(Error::Precondition("the measure is not properly ergodic".into()));
    }
    let mut out = PipelineOutput {
        spec: spec.clone(),
        slides: Vec::new(),
        stages: vec![spec.clone()],
    };
    if c.generator_ergodic() {
        return Ok(out);
    }
    let first_u = c
        .per_generator
        .iter()
        .position(|g| g.periodic_classes.len() < g.classes.len())
        .expect("properly ergodic");
    let first_class = c.per_generator[first_u]
        .classes
        .iter()
        .find(|cl| !c.per_generator[first_u].periodic_classes.contains(cl))
        .expect("aperiodic class")[0];

    let done = |s: &MarkovSpec| -> Result<bool, Error> { Ok(classify(s)?.generator_ergodic()) };
    let slide_class = |out: &mut PipelineOutput, u: usize, a: Symbol| -> Result<bool, Error> {
        let sets = special_sets(&out.spec, u, a)?;
        for set in [sets.e1, sets.e2] {
            if set.is_empty() {
                continue;
            }
            for t in (0..out.spec.rank()).filter(|&t| t != u) {
                let params = SlideParams::new(&out.spec, u, t, set.clone())?;
                let next = pushforward(&out.spec, &params)?;
                if next != out.spec {
                    out.spec = next;
                    out.slides.push(params);
                    out.stages.push(out.spec.clone());
                    if done(&out.spec)? {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    };

    if slide_class(&mut out, first_u, first_class)? {
        return Ok(out);
    }
    let rounds = spec.symbol_count() + 1;
    for _ in 0..rounds {
        for u in 0..spec.rank() {
            let g = crate::graphs::classify_generator(&support_edges(&out.spec, u)?);
            for class in g.classes.iter().filter(|cl| !g.periodic_classes.contains(cl) && cl.len() > 1) {
                if slide_class(&mut out, u, class[0])? {
                    return Ok(out);
                }
            }
        }
        if done(&out.spec)? {
            return Ok(out);
        }
    }
    Err(Error::Pipeline(format!(
        "still not generator-ergodic after {} slides",
        out.slides.len()
    )))
}

/// Applies each slide's `Ω` in order, reading `x` lazily.
pub fn replay_window<'a, W: Window + 'a>(taus: &'a [TauSpec], x: W) -> Box<dyn Window + 'a> {
    let mut view: Box<dyn Window + 'a> = Box::new(x);
    for tau in taus {
        view = Box::new(CocycleTable::new(tau, view));
    }
    view
}

/// The composed recoding of `slides` applied to `x`, on the ball of the
/// given radius.
pub fn replay<W: Window>(slides: &[SlideParams], rank: usize, x: W, radius: usize) -> Result<Configuration, Error> {
    let taus: Vec<TauSpec> = slides.iter().map(|p| p.tau(rank)).collect();
    let view = replay_window(&taus, x);
    let domain = ball(rank, radius)?;
    Ok(Configuration::capture(&*view, domain.iter())?)
}

/// A slide as JSON, with symbol and generator names.
pub fn params_to_json(spec: &MarkovSpec, p: &SlideParams) -> Value {
    let name = |a: Symbol| Value::String(spec.alphabet()[a].clone());
    let mut eta = Map::new();
    for (b, d) in &p.eta {
        eta.insert(
            spec.alphabet()[*b].clone(),
            json!({
                "n": d.n,
                "path": d.path.iter().map(|&a| name(a)).collect::<Vec<_>>(),
                "eta": name(d.eta),
            }),
        );
    }
    json!({
        "u": format!("s{}", p.u + 1),
        "t": format!("s{}", p.t + 1),
        "E": p.edges.iter().map(|&(a, b)| json!([name(a), name(b)])).collect::<Vec<_>>(),
        "eta": Value::Object(eta),
    })
}

fn generator_index(v: Option<&Value>, rank: usize, what: &str) -> Result<usize, Error> {
    let s = v
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Format(format!("{what} must be a generator name")))?;
    let i: usize = s
        .strip_prefix('s')
        .and_then(|d| d.parse().ok())
        .filter(|&i| i >= 1 && i <= rank)
        .ok_or_else(|| Error::Format(format!("{what}: unknown generator {s:?}")))?;
    Ok(i - 1)
}

/// Reads `{"u": "s1", "t": "s2", "E": [["a", "b"], …]}` and validates it.
/// Branch data is recomputed; any `eta` field is ignored.
pub fn params_from_json(spec: &MarkovSpec, v: &Value) -> Result<SlideParams, Error> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Format("slide params must be an object".into()))?;
    let u = generator_index(obj.get("u"), spec.rank(), "u")?;
    let t = generator_index(obj.get("t"), spec.rank(), "t")?;
    let symbol = |x: &Value| -> Result<Symbol, Error> {
        let s = x.as_str().ok_or_else(|| Error::Format("symbols must be strings".into()))?;
        spec.symbol(s).ok_or_else(|| Error::Format(format!("unknown symbol {s:?}")))
    };
    let edges = obj
        .get("E")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Format("E must be an array of pairs".into()))?
        .iter()
        .map(|pair| match pair.as_array().map(Vec::as_slice) {
            Some([a, b]) => Ok((symbol(a)?, symbol(b)?)),
            _ => Err(Error::Format("E entries must be pairs".into())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    SlideParams::new(spec, u, t, edges)
}
