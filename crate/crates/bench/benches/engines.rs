use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use oemarkov::chainspec::{cylinder_measure, sample_ball};
use oemarkov::edgeslide::{generator_ergodic_pipeline, pushforward};
use oemarkov::fullgroup::{bernoullization_sequence, match_full_group};
use oemarkov::graphs::classify;
use oemarkov_bench::{m2_slide, specs};

fn cylinders(c: &mut Criterion) {
    let mut g = c.benchmark_group("cylinder_measure");
    for (name, spec) in specs() {
        let phi = sample_ball(&spec, 2, 7).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(name), &phi, |b, phi| {
            b.iter(|| cylinder_measure(&spec, black_box(phi)).unwrap())
        });
    }
    g.finish();
}

fn classification(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify");
    for (name, spec) in specs() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &spec, |b, s| b.iter(|| classify(black_box(s)).unwrap()));
    }
    g.finish();
}

fn slides(c: &mut Criterion) {
    let (spec, params) = m2_slide();
    c.bench_function("pushforward/m2", |b| b.iter(|| pushforward(black_box(&spec), &params).unwrap()));
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(10);
    for (name, spec) in specs() {
        g.bench_with_input(BenchmarkId::from_parameter(name), &spec, |b, s| {
            b.iter(|| {
                let out = generator_ergodic_pipeline(black_box(s)).unwrap();
                bernoullization_sequence(&out.spec).unwrap()
            })
        });
    }
    g.finish();
}

fn matcher(c: &mut Criterion) {
    let phi: Vec<u8> = (0..64).map(|i| (i * 7 % 3) as u8).collect();
    let mut psi = phi.clone();
    psi.reverse();
    c.bench_function("match_full_group/64", |b| b.iter(|| match_full_group(black_box(&phi), &psi).unwrap()));
}

criterion_group!(benches, cylinders, classification, slides, matcher);
criterion_main!(benches);
