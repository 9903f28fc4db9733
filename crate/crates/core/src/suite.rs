//! The property suite behind `oemarkov verify`: cylinder calculus, the
//! slide pipeline with its cocycle checks, the Bernoulli sequence and the
//! Dye-step algebra for the built-in oracles, at a depth set by `level`.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chainspec::{
    cylinder_measure, cylinder_measure_with, rational, validate, Configuration, Enumerator, MarkovSpec, Rational,
    Sampler, Window,
};
use crate::check::Check;
use crate::cocycle::{check_cocycle_identity, check_equivariance};
use crate::edgeslide::{generator_ergodic_pipeline, replay, verify_slide_against, VerifyOptions};
use crate::error::Error;
use crate::freegroup::{ball, LeftConnectedSet};
use crate::fullgroup::{
    bernoullization_report, bernoullization_sequence, dye_checks, IdentityOracle, MarkerSwap, OEOracle, ZPoint, MAP_LEVEL,
};
use crate::graphs::{classify, Classification};

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub level: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Section {
    pub name: String,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub level: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    pub slides: usize,
    pub map_level: &'static str,
    pub sections: Vec<Section>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.sections.iter().all(|s| s.checks.iter().all(|c| c.passed))
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &Check)> {
        self.sections
            .iter()
            .flat_map(|s| s.checks.iter().map(move |c| (s.name.as_str(), c)))
            .filter(|(_, c)| !c.passed)
    }
}

fn section(name: impl Into<String>, checks: Vec<Check>) -> Section {
    Section {
        name: name.into(),
        checks,
    }
}

/// Exact and sampled checks of the cylinder formula on the unit ball.
fn cylinder_checks(spec: &MarkovSpec, level: usize, seed: u64) -> Result<Vec<Check>, Error> {
    let kernels = spec.letter_kernels()?;
    let d = ball(spec.rank(), 1)?;
    let words = d.elements().to_vec();
    let law = Enumerator::weighted(&kernels)
        .distribution(|x| words.iter().map(|g| x.value(g)).collect::<Result<Vec<_>, _>>())?;

    let mut total = Rational::zero();
    let mut factor = None;
    let mut additive = None;
    let mut invariant = None;
    for (values, mass) in &law {
        total += mass;
        let phi = Configuration::on(&d, values)?;
        if factor.is_none() && cylinder_measure_with(&kernels, &phi)? != *mass {
            factor = Some(format!("{phi:?}"));
        }
        if additive.is_none() {
            for g in ball(spec.rank(), 2)?.iter().filter(|g| g.len() == 2) {
                let mut sum = Rational::zero();
                for a in 0..spec.symbol_count() {
                    let mut ext = phi.clone();
                    ext.insert(g.clone(), a);
                    sum += cylinder_measure(spec, &ext)?;
                }
                if sum != *mass {
                    additive = Some(format!("{phi:?} extended at {g}"));
                    break;
                }
            }
        }
        if invariant.is_none() {
            for h in words.iter().filter(|h| !h.is_identity()) {
                let moved = phi.translate(h);
                if cylinder_measure(spec, &moved)? != *mass {
                    invariant = Some(format!("{phi:?} translated by {h}"));
                    break;
                }
            }
        }
    }
    let total = (!total.is_one()).then(|| format!("total mass {}", rational::format(&total)));

    let samples = 2000 * level as u64;
    let sampler = Sampler::from_kernels(&kernels, seed);
    let mut counts = vec![0u64; law.len()];
    let index: std::collections::HashMap<&Vec<usize>, usize> = law.iter().enumerate().map(|(i, (v, _))| (v, i)).collect();
    let mut stray = None;
    for i in 0..samples {
        let x = sampler.sample(i);
        let v: Vec<usize> = words.iter().map(|g| x.get(g)).collect();
        match index.get(&v) {
            Some(&k) => counts[k] += 1,
            None => {
                stray.get_or_insert_with(|| format!("sample {i} lands on a null cylinder"));
            }
        }
    }
    let n = samples as f64;
    let far = law.iter().zip(&counts).find_map(|((v, p), &c)| {
        let p = rational::to_f64(p);
        let sigma = (p * (1.0 - p) / n).sqrt();
        let freq = c as f64 / n;
        ((freq - p).abs() > 4.0 * sigma + 1.0 / n).then(|| format!("cylinder {v:?}: frequency {freq:.5}, exact {p:.5}"))
    });

    Ok(vec![
        Check::from_witness("cylinder measures factor along the unit ball", factor),
        Check::from_witness("cylinder masses sum to one", total),
        Check::from_witness("cylinder measures are additive", additive),
        Check::from_witness("cylinder measures are translation invariant", invariant),
        Check::from_witness("samples avoid null cylinders", stray),
        Check::from_witness("sampled frequencies within four sigma", far),
    ])
}

/// Random eventually periodic test points over `symbols` symbols.
pub fn test_points(symbols: usize, count: usize, seed: u64) -> Vec<ZPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut word = |lo: usize, hi: usize| -> Vec<usize> {
                let len = rng.random_range(lo..=hi);
                (0..len).map(|_| rng.random_range(0..symbols)).collect()
            };
            let (l, m, r) = (word(1, 3), word(0, 12), word(1, 3));
            ZPoint::new(l, m, r, 0).expect("non-empty tails")
        })
        .collect()
}

/// The oracles the Dye-step checks run with.
pub fn builtin_oracles(symbols: usize) -> Result<Vec<Arc<dyn OEOracle>>, Error> {
    let mut out: Vec<Arc<dyn OEOracle>> = vec![Arc::new(IdentityOracle)];
    if symbols >= 2 {
        out.push(Arc::new(MarkerSwap::new(vec![0, 1], 0)?));
        out.push(Arc::new(MarkerSwap::label_preserving(1, 0)?));
    }
    Ok(out)
}

pub fn verify_suite(spec: &MarkovSpec, opts: SuiteOptions) -> Result<SuiteReport, Error> {
    let level = opts.level.max(1);
    let seed = opts.seed;
    let mut report = SuiteReport {
        level,
        seed,
        classification: None,
        slides: 0,
        map_level: MAP_LEVEL,
        sections: Vec::new(),
    };
    let valid = validate(spec);
    report.sections.push(section(
        "spec",
        vec![Check::from_witness("valid spec", valid.violations.first().map(|v| v.to_string()))],
    ));
    if !valid.is_valid() {
        return Ok(report);
    }
    report.sections.push(section("cylinders", cylinder_checks(spec, level, seed)?));
    let c = classify(spec)?;
    let properly = c.properly_ergodic;
    report.classification = Some(c);

    let mut last = spec.clone();
    if properly {
        let out = generator_ergodic_pipeline(spec)?;
        report.slides = out.slides.len();
        let samples = 10 * level as u64;
        for (k, params) in out.slides.iter().enumerate().take(level) {
            let (before, after) = (&out.stages[k], &out.stages[k + 1]);
            let opts = VerifyOptions {
                samples: 2 * samples,
                seed,
                ..Default::default()
            };
            let mut checks = verify_slide_against(before, params, after, opts)?.checks;
            let tau = params.tau(spec.rank());
            checks.push(check_cocycle_identity(&tau, before, (level + 2).min(4), samples, seed)?);
            checks.push(check_equivariance(&tau, before, 1, samples, seed)?);
            report.sections.push(section(format!("slide {}", k + 1), checks));
        }

        let final_c = classify(&out.spec)?;
        let moved = out.stages.iter().position(|s| s.pi() != spec.pi());
        let round_trip = replay_round_trip(spec, &out.slides, samples, seed)?;
        report.sections.push(section(
            "pipeline",
            vec![
                Check::from_witness(
                    "output is generator-ergodic",
                    (!final_c.generator_ergodic()).then(|| "some restriction is not ergodic and free".to_string()),
                ),
                Check::from_witness("one-site law unchanged", moved.map(|i| format!("stage {i}"))),
                Check::from_witness("replay then reverse replay is the identity", round_trip),
            ],
        ));
        let seq = bernoullization_sequence(&out.spec)?;
        report
            .sections
            .push(section("bernoullization", bernoullization_report(&out.spec, &seq).checks));
        last = out.spec;
    }

    let points = test_points(spec.symbol_count(), 10 * level, seed);
    let range = (level as i64 + 1).min(3);
    for oracle in builtin_oracles(spec.symbol_count())? {
        let name = format!("dye step, {}", oracle.name());
        report.sections.push(section(name, dye_checks(oracle, &last, 0, &points, range)?));
    }
    Ok(report)
}

fn replay_round_trip(
    spec: &MarkovSpec,
    slides: &[crate::edgeslide::SlideParams],
    samples: u64,
    seed: u64,
) -> Result<Option<String>, Error> {
    let sampler = Sampler::new(spec, seed)?;
    let domain: LeftConnectedSet = ball(spec.rank(), 1)?;
    let mut round = slides.to_vec();
    round.extend(slides.iter().rev().cloned());
    for i in 0..samples {
        let x = sampler.sample(i);
        let back = replay(&round, spec.rank(), &x, 1)?;
        if let Some(h) = domain.iter().find(|h| back.get(h) != Some(x.get(h))) {
            return Ok(Some(format!("sample {i} differs at {h}")));
        }
    }
    Ok(None)
}
