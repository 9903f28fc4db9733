//! Small named chains and seeded random generators of valid specs, shared
//! by tests, benchmarks and the acceptance suite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chainspec::rational::{int, ratio};
use crate::chainspec::{bernoulli_spec, Kernel, MarkovSpec, Rational, Symbol};
use crate::graphs::classify;

/// Two symbols, uniform π, i.i.d. along s1 and a deterministic swap along s2.
pub fn m1() -> MarkovSpec {
    MarkovSpec::numbered(
        vec![ratio(1, 2), ratio(1, 2)],
        vec![
            Kernel::from_ratios(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]).unwrap(),
            Kernel::from_ratios(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]).unwrap(),
        ],
    )
    .unwrap()
}

/// Three symbols; along s1 the support is 0→1, 1→{0,2}, 2→0 and along
/// s2 symbols 0 and 1 swap while 2 is fixed.
pub fn m2() -> MarkovSpec {
    MarkovSpec::numbered(
        vec![ratio(2, 5), ratio(2, 5), ratio(1, 5)],
        vec![
            Kernel::from_ratios(&[&[(0, 1), (1, 1), (0, 1)], &[(1, 2), (0, 1), (1, 2)], &[(1, 1), (0, 1), (0, 1)]])
                .unwrap(),
            Kernel::from_ratios(&[&[(0, 1), (1, 1), (0, 1)], &[(1, 1), (0, 1), (0, 1)], &[(0, 1), (0, 1), (1, 1)]])
                .unwrap(),
        ],
    )
    .unwrap()
}

pub fn uniform_bernoulli(symbols: usize, rank: usize) -> MarkovSpec {
    bernoulli_spec(
        (0..symbols).map(|a| a.to_string()).collect(),
        vec![ratio(1, symbols as i64); symbols],
        rank,
    )
    .unwrap()
}

fn normalise(weights: &[u32]) -> Vec<Rational> {
    let total: u32 = weights.iter().sum();
    weights.iter().map(|&w| ratio(w as i64, total as i64)).collect()
}

fn permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<Symbol> {
    let mut p: Vec<Symbol> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// A random convex combination of `1..=max_terms` permutation matrices,
/// which is stationary for the uniform distribution.
pub fn permutation_mixture<R: Rng>(rng: &mut R, n: usize, max_terms: usize) -> Kernel {
    let terms = rng.random_range(1..=max_terms.max(1));
    let weights: Vec<u32> = (0..terms).map(|_| rng.random_range(1..=3)).collect();
    let weights = normalise(&weights);
    let mut rows = vec![vec![int(0); n]; n];
    for w in weights {
        for (a, b) in permutation(rng, n).into_iter().enumerate() {
            rows[a][b] += &w;
        }
    }
    Kernel::new(rows).unwrap()
}

/// A random kernel stationary for `pi`: a convex combination of the
/// identity and of kernels that, inside each block of a random partition,
/// jump to `b` with probability proportional to `π(b)`.
pub fn block_mixture<R: Rng>(rng: &mut R, pi: &[Rational]) -> Kernel {
    let n = pi.len();
    let terms = rng.random_range(1..=3);
    let weights: Vec<u32> = (0..=terms).map(|i| if i == 0 { rng.random_range(0..=2) } else { rng.random_range(1..=3) }).collect();
    let weights = normalise(&weights);
    let mut rows = vec![vec![int(0); n]; n];
    for (a, row) in rows.iter_mut().enumerate() {
        row[a] += &weights[0];
    }
    for w in &weights[1..] {
        let blocks = rng.random_range(1..=n);
        let label: Vec<usize> = (0..n).map(|_| rng.random_range(0..blocks)).collect();
        for a in 0..n {
            let mass: Rational = (0..n).filter(|&b| label[b] == label[a]).map(|b| pi[b].clone()).sum();
            for b in (0..n).filter(|&b| label[b] == label[a]) {
                rows[a][b] += w * &pi[b] / &mass;
            }
        }
    }
    Kernel::new(rows).unwrap()
}

/// A random valid spec on `symbols` symbols and `rank` generators. Half the
/// time π is uniform and the kernels are permutation mixtures, otherwise π
/// is random and the kernels are block mixtures.
pub fn random_spec<R: Rng>(rng: &mut R, symbols: usize, rank: usize) -> MarkovSpec {
    let kernels;
    let pi;
    if rng.random_bool(0.5) {
        pi = vec![ratio(1, symbols as i64); symbols];
        kernels = (0..rank).map(|_| permutation_mixture(rng, symbols, 3)).collect();
    } else {
        let w: Vec<u32> = (0..symbols).map(|_| rng.random_range(1..=4)).collect();
        pi = normalise(&w);
        kernels = (0..rank).map(|_| block_mixture(rng, &pi)).collect();
    }
    MarkovSpec::numbered(pi, kernels).unwrap()
}

/// A random rank-two spec that is properly ergodic but has a periodic
/// class in some generator restriction, so the slide pipeline has work to
/// do.
pub fn random_periodic_spec<R: Rng>(rng: &mut R, symbols: usize) -> MarkovSpec {
    assert!(symbols >= 2, "need at least two symbols");
    loop {
        let pi = vec![ratio(1, symbols as i64); symbols];
        let kernels = vec![
            permutation_mixture(rng, symbols, 3),
            permutation_mixture(rng, symbols, 1),
        ];
        let spec = MarkovSpec::numbered(pi, kernels).unwrap();
        let c = classify(&spec).unwrap();
        if c.properly_ergodic && !c.generator_ergodic() {
            return spec;
        }
    }
}
