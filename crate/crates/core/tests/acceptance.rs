//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oemarkov::catalog::{m1, m2, permutation_mixture, random_periodic_spec, random_spec, uniform_bernoulli};
use oemarkov::chainspec::rational::{self, ratio};
use oemarkov::chainspec::{bernoulli_spec, cylinder_measure, restriction, validate, Configuration, Kernel, Sampler};
use oemarkov::cocycle::{check_cocycle_identity, check_equivariance, check_involution, check_omega_involution};
use oemarkov::edgeslide::{
    generator_ergodic_pipeline, monte_carlo_joint, pushforward, pushforward_joint, replay, SlideParams,
};
use oemarkov::fullgroup::{
    bernoullization_report, bernoullization_sequence, build_dye_tau, dye_checks, match_full_group, IdentityOracle,
    MarkerSwap, OEOracle, ZPoint,
};
use oemarkov::graphs::classify;
use oemarkov::suite::test_points;
use oemarkov::{ball, Check, Letter, MarkovSpec, Rational, Symbol, Word};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn passed(c: &Check, context: &str) -> Result<(), String> {
    ensure(c.passed, || format!("{context}: {} failed: {}", c.name, c.witness.clone().unwrap_or_default()))
}

/// `π(x_e)` times the step kernel along every edge, with reverse kernels
/// `π(b) P(b, a) / π(a)` computed here from scratch.
struct ProductOracle {
    pi: Vec<Rational>,
    steps: HashMap<Letter, Vec<Vec<Rational>>>,
}

impl ProductOracle {
    fn new(spec: &MarkovSpec) -> Self {
        let n = spec.symbol_count();
        let pi = spec.pi().to_vec();
        let mut steps = HashMap::new();
        for (s, k) in spec.kernels().iter().enumerate() {
            let fwd: Vec<Vec<Rational>> = (0..n).map(|a| (0..n).map(|b| k.get(a, b).clone()).collect()).collect();
            let rev = (0..n)
                .map(|a| (0..n).map(|b| &pi[b] * &fwd[b][a] / &pi[a]).collect())
                .collect();
            steps.insert(Letter::gen(s), fwd);
            steps.insert(Letter::inv(s), rev);
        }
        ProductOracle { pi, steps }
    }

    /// Factor contributed by site `g` with value `a` given its parent value.
    fn factor(&self, g: &Word, parent: Option<Symbol>, a: Symbol) -> Rational {
        match parent {
            None => self.pi[a].clone(),
            Some(p) => self.steps[&g.first().unwrap()][p][a].clone(),
        }
    }
}

/// Sites of a left-connected domain in an order where parents come first,
/// with the index of each parent.
fn ordered(words: impl IntoIterator<Item = Word>) -> (Vec<Word>, Vec<Option<usize>>) {
    let mut sites: Vec<Word> = words.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    sites.sort_by_key(|w| w.len());
    let index: HashMap<Word, usize> = sites.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let parents = sites.iter().map(|w| w.parent().map(|p| index[&p])).collect();
    (sites, parents)
}

/// Depth-first walk over every configuration of `sites`, pruning as soon as
/// the oracle mass hits zero. `leaf` sees each configuration of positive
/// mass, `null` each minimal null prefix.
fn walk(
    oracle: &ProductOracle,
    sites: &[Word],
    parents: &[Option<usize>],
    symbols: usize,
    leaf: &mut dyn FnMut(&[Symbol], &Rational),
    null: &mut dyn FnMut(&[Symbol]),
) {
    struct Tree<'a> {
        o: &'a ProductOracle,
        sites: &'a [Word],
        parents: &'a [Option<usize>],
        symbols: usize,
    }
    fn go(
        tree: &Tree,
        values: &mut Vec<Symbol>,
        mass: Rational,
        leaf: &mut dyn FnMut(&[Symbol], &Rational),
        null: &mut dyn FnMut(&[Symbol]),
    ) {
        let i = values.len();
        if i == tree.sites.len() {
            leaf(values, &mass);
            return;
        }
        for a in 0..tree.symbols {
            let f = tree.o.factor(&tree.sites[i], tree.parents[i].map(|p| values[p]), a);
            values.push(a);
            if f.is_zero() {
                null(values);
            } else {
                go(tree, values, &mass * f, leaf, null);
            }
            values.pop();
        }
    }
    let tree = Tree {
        o: oracle,
        sites,
        parents,
        symbols,
    };
    go(&tree, &mut Vec::new(), Rational::one(), leaf, null);
}

fn config(sites: &[Word], values: &[Symbol]) -> Configuration {
    Configuration::from_pairs(sites.iter().cloned().zip(values.iter().copied()))
}

/// A random spec whose kernels have at most two nonzero entries per row:
/// permutation mixtures under uniform `π`, or block kernels with blocks of
/// size at most two under a random `π`.
fn sparse_spec(rng: &mut ChaCha8Rng, n: usize) -> MarkovSpec {
    if rng.random_bool(0.5) {
        let pi = vec![ratio(1, n as i64); n];
        return MarkovSpec::numbered(pi, (0..2).map(|_| permutation_mixture(rng, n, 2)).collect()).unwrap();
    }
    let w: Vec<i64> = (0..n).map(|_| rng.random_range(1..=4)).collect();
    let total: i64 = w.iter().sum();
    let pi: Vec<Rational> = w.iter().map(|&x| ratio(x, total)).collect();
    let kernels = (0..2)
        .map(|_| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut rows = vec![vec![Rational::zero(); n]; n];
            for block in order.chunks(2) {
                let mass: Rational = block.iter().map(|&b| pi[b].clone()).sum();
                for &a in block {
                    for &b in block {
                        rows[a][b] = &pi[b] / &mass;
                    }
                }
            }
            Kernel::new(rows).unwrap()
        })
        .collect();
    MarkovSpec::numbered(pi, kernels).unwrap()
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut leaves_checked = 0usize;
    for (k, n) in [2usize, 3, 3, 4, 4].into_iter().enumerate() {
        let spec = sparse_spec(&mut rng, n);
        ensure(validate(&spec).is_valid(), || format!("spec {k} invalid"))?;
        let oracle = ProductOracle::new(&spec);
        let (sites, parents) = ordered(ball(2, 2).unwrap().iter().cloned());
        let (unit, _) = ordered(ball(2, 1).unwrap().iter().cloned());
        let unit_index: Vec<usize> = unit.iter().map(|w| sites.iter().position(|s| s == w).unwrap()).collect();

        let mut marginal: HashMap<Vec<Symbol>, Rational> = HashMap::new();
        let mut total = Rational::zero();
        let mut failure = None;
        let mut null_failure = None;
        walk(
            &oracle,
            &sites,
            &parents,
            n,
            &mut |values, mass| {
                leaves_checked += 1;
                total += mass;
                let key = unit_index.iter().map(|&i| values[i]).collect();
                *marginal.entry(key).or_insert_with(Rational::zero) += mass;
                if failure.is_none() && cylinder_measure(&spec, &config(&sites, values)).unwrap() != *mass {
                    failure = Some(format!("spec {k}: cylinder measure differs on {values:?}"));
                }
            },
            &mut |prefix| {
                if null_failure.is_none() && !cylinder_measure(&spec, &config(&sites, prefix)).unwrap().is_zero() {
                    null_failure = Some(format!("spec {k}: null prefix {prefix:?} has positive measure"));
                }
            },
        );
        if let Some(f) = failure.take().or(null_failure) {
            return Err(f);
        }
        ensure(total.is_one(), || format!("spec {k}: support mass {total}"))?;

        // every configuration on ball(2) for two symbols, with no pruning
        if n == 2 {
            let mut values = vec![0; sites.len()];
            for code in 0u32..(1 << sites.len()) {
                for (i, v) in values.iter_mut().enumerate() {
                    *v = ((code >> i) & 1) as usize;
                }
                let mut mass = Rational::one();
                for i in 0..sites.len() {
                    mass *= oracle.factor(&sites[i], parents[i].map(|p| values[p]), values[i]);
                }
                ensure(cylinder_measure(&spec, &config(&sites, &values)).unwrap() == mass, || {
                    format!("spec {k}: exhaustive mismatch at {values:?}")
                })?;
            }
        }

        // marginalisation onto every configuration of the unit ball,
        // additivity along every length-two word, translation invariance
        let longer: Vec<Word> = sites.iter().filter(|w| w.len() == 2).cloned().collect();
        let mut values = vec![0; unit.len()];
        loop {
            let psi = config(&unit, &values);
            let mu = cylinder_measure(&spec, &psi).unwrap();
            let expected = marginal.get(&values).cloned().unwrap_or_else(Rational::zero);
            ensure(mu == expected, || format!("spec {k}: marginal of {values:?} is {expected}, cylinder {mu}"))?;
            for g in &longer {
                let sum: Rational = (0..n)
                    .map(|a| {
                        let mut ext = psi.clone();
                        ext.insert(g.clone(), a);
                        cylinder_measure(&spec, &ext).unwrap()
                    })
                    .sum();
                ensure(sum == mu, || format!("spec {k}: additivity fails for {values:?} at {g}"))?;
            }
            for h in unit.iter().filter(|h| !h.is_identity()) {
                ensure(cylinder_measure(&spec, &psi.translate(h)).unwrap() == mu, || {
                    format!("spec {k}: translation by {h} changes {values:?}")
                })?;
            }
            let mut i = 0;
            while i < values.len() && values[i] + 1 == n {
                values[i] = 0;
                i += 1;
            }
            if i == values.len() {
                break;
            }
            values[i] += 1;
        }

        // translation invariance on ball(2) cylinders of positive mass
        let mut taken = 0;
        walk(
            &oracle,
            &sites,
            &parents,
            n,
            &mut |values, mass| {
                taken += 1;
                if taken % 37 != 0 || failure.is_some() {
                    return;
                }
                let phi = config(&sites, values);
                for h in unit.iter().filter(|h| !h.is_identity()) {
                    if cylinder_measure(&spec, &phi.translate(h)).unwrap() != *mass {
                        failure = Some(format!("spec {k}: translation by {h} changes {values:?}"));
                    }
                }
            },
            &mut |_| {},
        );
        if let Some(f) = failure {
            return Err(f);
        }
    }
    Ok(format!("5 specs, {leaves_checked} positive ball(2) cylinders"))
}

/// Classes, periodicity and ergodicity computed by BFS and degree counts.
struct GraphOracle {
    ergodic: bool,
    free: bool,
    classes: BTreeSet<Vec<Symbol>>,
    periodic: BTreeSet<Vec<Symbol>>,
}

fn components(n: usize, edges: &[(Symbol, Symbol)]) -> Vec<Vec<Symbol>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut comp = Vec::new();
        while let Some(v) = queue.pop_front() {
            comp.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out
}

fn support(spec: &MarkovSpec, s: usize) -> Vec<(Symbol, Symbol)> {
    let n = spec.symbol_count();
    let k = &spec.kernels()[s];
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| !k.get(a, b).is_zero())
        .collect()
}

fn graph_oracle(n: usize, edges: &[(Symbol, Symbol)]) -> GraphOracle {
    let comps = components(n, edges);
    let outd = |a| edges.iter().filter(|e| e.0 == a).count();
    let ind = |a| edges.iter().filter(|e| e.1 == a).count();
    let periodic: BTreeSet<Vec<Symbol>> =
        comps.iter().filter(|c| c.iter().all(|&a| outd(a) == 1 && ind(a) == 1)).cloned().collect();
    GraphOracle {
        ergodic: comps.len() == 1,
        free: periodic.is_empty(),
        classes: comps.into_iter().collect(),
        periodic,
    }
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut kinds = [0usize; 3];
    for i in 0..100 {
        let n = rng.random_range(1..=6);
        let rank = rng.random_range(2..=3);
        let spec = match i % 4 {
            0 if n >= 2 => random_periodic_spec(&mut rng, n),
            1 => {
                let pi = vec![ratio(1, n as i64); n];
                let kernels = (0..rank)
                    .map(|_| {
                        if rng.random_bool(0.3) {
                            Kernel::identity(n)
                        } else {
                            permutation_mixture(&mut rng, n, 2)
                        }
                    })
                    .collect();
                MarkovSpec::numbered(pi, kernels).unwrap()
            }
            _ => random_spec(&mut rng, n, rank),
        };
        let c = classify(&spec).map_err(|e| e.to_string())?;
        let mut all_edges = Vec::new();
        let mut some_aperiodic = false;
        for s in 0..spec.rank() {
            let edges = support(&spec, s);
            let o = graph_oracle(n, &edges);
            let g = &c.per_generator[s];
            let classes: BTreeSet<Vec<Symbol>> = g.classes.iter().cloned().collect();
            let periodic: BTreeSet<Vec<Symbol>> = g.periodic_classes.iter().cloned().collect();
            ensure(
                g.ergodic == o.ergodic && g.free == o.free && classes == o.classes && periodic == o.periodic,
                || format!("spec {i}, generator s{}: classify disagrees with the oracle", s + 1),
            )?;
            some_aperiodic |= o.periodic.len() < o.classes.len();
            all_edges.extend(edges);
        }
        let ergodic = components(n, &all_edges).len() == 1;
        ensure(c.ergodic == ergodic, || format!("spec {i}: ergodicity disagrees"))?;
        ensure(c.properly_ergodic == (ergodic && some_aperiodic), || {
            format!("spec {i}: proper ergodicity disagrees")
        })?;
        kinds[usize::from(c.generator_ergodic()) + usize::from(c.properly_ergodic)] += 1;
    }
    let c = classify(&m1()).unwrap();
    let (s1, s2) = (&c.per_generator[0], &c.per_generator[1]);
    ensure(s1.free && s1.ergodic && s2.ergodic && !s2.free && c.properly_ergodic, || {
        "M1 classification".into()
    })?;
    Ok(format!("100 specs agree with the BFS oracle (mix {kinds:?}); M1 as expected"))
}

/// The three slides used by criteria 3 and 4.
fn slides() -> Vec<(&'static str, MarkovSpec, SlideParams)> {
    let mut out = vec![
        ("M1", m1(), SlideParams::new(&m1(), 0, 1, vec![(0, 1)]).unwrap()),
        ("M2", m2(), SlideParams::new(&m2(), 0, 1, vec![(0, 1)]).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let spec = random_periodic_spec(&mut rng, 4);
    let pipe = generator_ergodic_pipeline(&spec).unwrap();
    out.push(("random", pipe.stages[0].clone(), pipe.slides[0].clone()));
    out
}

fn criterion_3() -> Outcome {
    for (name, spec, params) in slides() {
        ensure(!params.edges.is_empty(), || format!("{name}: empty edge set"))?;
        let tau = params.tau(spec.rank());
        let e = |r: oemarkov::Result<Check>| r.map_err(|e| e.to_string());
        passed(&e(check_involution(&tau, &spec))?, name)?;
        passed(&e(check_cocycle_identity(&tau, &spec, 4, 100, 31))?, name)?;
        passed(&e(check_omega_involution(&tau, &spec, 2, 100, 32))?, name)?;
        passed(&e(check_equivariance(&tau, &spec, 2, 100, 33))?, name)?;
    }
    Ok("involution, cocycle identity (|g|+|h| <= 4, 100 samples), Omega o Omega on ball(2), equivariance".into())
}

/// `ρ(y_e = a, y_t = b)` by summing the product oracle over every
/// configuration of `D ∪ ball(1)`, with `τ(t, x)` in closed form.
fn brute_joint(spec: &MarkovSpec, p: &SlideParams) -> Vec<Vec<Rational>> {
    let (u, t) = (Letter::gen(p.u), Letter::gen(p.t));
    let ukt = |k: i64| Word::power(u, k).multiply(&Word::letter(t));
    let mut words: Vec<Word> = vec![Word::identity(), Word::letter(t)];
    words.extend((-1..=p.n_max() as i64 + 1).map(ukt));
    words.extend(ball(spec.rank(), 1).unwrap().iter().cloned());
    let (sites, parents) = ordered(words);
    let at: HashMap<Word, usize> = sites.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let n = spec.symbol_count();
    let mut joint = vec![vec![Rational::zero(); n]; n];
    walk(
        &ProductOracle::new(spec),
        &sites,
        &parents,
        n,
        &mut |values, mass| {
            let x = |g: &Word| values[at[g]];
            // (x_{u^{k-1} t}, x_{u^k t}) ∈ E and x_{u^{k+n} t} = η
            let flagged = |k: i64| {
                let here = x(&ukt(k));
                p.edges.contains(&(x(&ukt(k - 1)), here))
                    && p.eta.get(&here).is_some_and(|d| x(&ukt(k + d.n as i64)) == d.eta)
            };
            let step = if flagged(1) {
                ukt(1)
            } else if flagged(0) {
                ukt(-1)
            } else {
                Word::letter(t)
            };
            joint[x(&Word::identity())][x(&step)] += mass;
        },
        &mut |_| {},
    );
    joint
}

fn criterion_4() -> Outcome {
    let samples = 100_000;
    for (name, spec, params) in slides() {
        let exact = pushforward_joint(&spec, &params).map_err(|e| e.to_string())?;
        ensure(exact == brute_joint(&spec, &params), || format!("{name}: window and brute force differ"))?;
        let rho = pushforward(&spec, &params).map_err(|e| e.to_string())?;
        for s in (0..spec.rank()).filter(|&s| s != params.t) {
            ensure(restriction(&rho, s).unwrap() == restriction(&spec, s).unwrap(), || {
                format!("{name}: restriction to s{} changed", s + 1)
            })?;
        }
        let et = support(&spec, params.t);
        let mut needed: BTreeSet<(Symbol, Symbol)> = et.iter().copied().collect();
        for &(alpha, a) in &et {
            for &(a2, b) in &params.edges {
                if a == a2 {
                    needed.insert((alpha, b));
                }
            }
        }
        let q = &rho.kernels()[params.t];
        if let Some(&(a, b)) = needed.iter().find(|&&(a, b)| q.get(a, b).is_zero()) {
            return Err(format!("{name}: Q_t({a}, {b}) = 0 but the pair is required"));
        }
        let estimate = monte_carlo_joint(&spec, &params, samples, 44).map_err(|e| e.to_string())?;
        for (a, row) in exact.iter().enumerate() {
            for (b, p) in row.iter().enumerate() {
                let p = rational::to_f64(p);
                let sigma = (p * (1.0 - p) / samples as f64).sqrt();
                ensure((estimate[a][b] - p).abs() <= 4.0 * sigma, || {
                    format!("{name}: Monte Carlo ({a}, {b}) = {} vs exact {p}", estimate[a][b])
                })?;
            }
        }
    }
    Ok(format!("3 slides: exact = brute force, restrictions, support, Monte Carlo at {samples} samples"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut specs = vec![m1()];
    specs.extend((0..3).map(|i| random_periodic_spec(&mut rng, 3 + i % 2)));
    let mut total = 0;
    for (i, spec) in specs.iter().enumerate() {
        let out = generator_ergodic_pipeline(spec).map_err(|e| format!("spec {i}: {e}"))?;
        total += out.slides.len();
        let c = classify(&out.spec).unwrap();
        ensure(c.per_generator.iter().all(|g| g.ergodic && g.free), || {
            format!("spec {i}: output not generator-ergodic")
        })?;
        ensure(out.spec.pi() == spec.pi(), || format!("spec {i}: pi changed"))?;
        let mut round = out.slides.clone();
        round.extend(out.slides.iter().rev().cloned());
        let sampler = Sampler::new(spec, 55).unwrap();
        let domain = ball(spec.rank(), 2).unwrap();
        for k in 0..10 {
            let x = sampler.sample(k);
            let back = replay(&round, spec.rank(), &x, 2).map_err(|e| e.to_string())?;
            if let Some(h) = domain.iter().find(|h| back.get(h) != Some(x.get(h))) {
                return Err(format!("spec {i}: round trip differs at {h} on sample {k}"));
            }
        }
    }
    Ok(format!("M1 and 3 random specs, {total} slides in total, round trip on ball(2)"))
}

fn criterion_6() -> Outcome {
    let mut pairs = 0u64;
    for (symbols, max_n) in [(2usize, 8usize), (3, 6)] {
        for n in 1..=max_n {
            let count = symbols.pow(n as u32);
            let decode = |mut c: usize| -> Vec<usize> {
                (0..n)
                    .map(|_| {
                        let d = c % symbols;
                        c /= symbols;
                        d
                    })
                    .collect()
            };
            let mut by_content: HashMap<Vec<usize>, Vec<Vec<usize>>> = HashMap::new();
            for c in 0..count {
                let v = decode(c);
                let mut key = v.clone();
                key.sort();
                by_content.entry(key).or_default().push(v);
            }
            for group in by_content.values() {
                for phi in group {
                    for psi in group {
                        let s = match_full_group(phi, psi).map_err(|e| e.to_string())?;
                        let mut hit = vec![false; n];
                        for x in 0..n {
                            let y = s.apply(x);
                            ensure(y < n && !hit[y], || format!("{phi:?}, {psi:?}: not a bijection"))?;
                            hit[y] = true;
                            ensure(psi[x] == phi[y], || format!("{phi:?}, {psi:?}: psi != phi o S at {x}"))?;
                        }
                        pairs += 1;
                    }
                }
            }
        }
    }
    let s = match_full_group(&['a', 'b', 'a', 'b'], &['a', 'a', 'b', 'b']).unwrap();
    ensure(s.images() == [0, 2, 1, 3], || format!("worked example gave {s}"))?;
    ensure(s.to_string() == "(0)(1 2)(3)", || format!("worked example displays as {s}"))?;
    Ok(format!("{pairs} label pairs; worked example S = {s}"))
}

fn criterion_7() -> Outcome {
    let spec = uniform_bernoulli(3, 2);
    let mut points = test_points(3, 150, 707);
    // every middle block of length five between constant tails
    for code in 0..3usize.pow(5) {
        let mid: Vec<Symbol> = (0..5).map(|i| code / 3usize.pow(i) % 3).collect();
        points.push(ZPoint::new(vec![code % 2], mid, vec![2 - code % 3], 0).unwrap());
    }
    let mut oracles: Vec<(Arc<dyn OEOracle>, bool)> = vec![(Arc::new(IdentityOracle), true)];
    for m in 0..3 {
        for a in (0..3).filter(|&a| a != m) {
            oracles.push((Arc::new(MarkerSwap::label_preserving(m, a).unwrap()), true));
        }
    }
    oracles.push((Arc::new(MarkerSwap::new(vec![0, 1], 0).unwrap()), false));
    oracles.push((Arc::new(MarkerSwap::new(vec![2, 0, 1], 1).unwrap()), false));
    for (oracle, preserving) in &oracles {
        let checks = dye_checks(oracle.clone(), &spec, 1, &points, 3).map_err(|e| e.to_string())?;
        for c in &checks {
            passed(c, &oracle.name())?;
        }
        for needed in ["(b1)", "(b2)", "(b3)", "(b4)", "(b5)", "(o4)", "involution"] {
            ensure(checks.iter().any(|c| c.name.contains(needed)), || format!("{}: no {needed} check", oracle.name()))?;
        }
        ensure(!preserving || checks.iter().any(|c| c.name.starts_with("(R1)")), || {
            format!("{}: (R1) not run", oracle.name())
        })?;
        let tau = build_dye_tau(oracle.clone(), 2, 0).map_err(|e| e.to_string())?;
        passed(&check_involution(&tau, &spec).map_err(|e| e.to_string())?, &oracle.name())?;
    }
    Ok(format!("{} oracles on {} points, |n| <= 3", oracles.len(), points.len()))
}

fn criterion_8() -> Outcome {
    let spec = m1();
    let out = generator_ergodic_pipeline(&spec).map_err(|e| e.to_string())?;
    let seq = bernoullization_sequence(&out.spec).map_err(|e| e.to_string())?;
    ensure(seq.len() == spec.rank() + 1, || format!("{} stages", seq.len()))?;
    for (i, s) in seq.iter().enumerate() {
        ensure(validate(s).is_valid(), || format!("stage {i} invalid"))?;
    }
    let target = bernoulli_spec(spec.alphabet().to_vec(), spec.pi().to_vec(), spec.rank()).unwrap();
    ensure(seq.last() == Some(&target), || "final stage is not Bernoulli".into())?;
    let report = bernoullization_report(&out.spec, &seq);
    ensure(report.map_level == "oracle-dependent", || format!("map level {}", report.map_level))?;
    for c in &report.checks {
        passed(c, "report")?;
    }
    Ok(format!("{} stages ending in the Bernoulli spec; map level {}", seq.len(), report.map_level))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("cylinder calculus", criterion_1),
        ("classification", criterion_2),
        ("cocycle engine", criterion_3),
        ("edge-slide pushforward", criterion_4),
        ("pipeline", criterion_5),
        ("full group matcher", criterion_6),
        ("Dye-step algebra", criterion_7),
        ("bernoullization", criterion_8),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
