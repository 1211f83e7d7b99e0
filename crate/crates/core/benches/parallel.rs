use std::hint::black_box;

use absubdiff_core::extremum::{check_corpus, random_c1_family};
use absubdiff_core::fracops::{ab_derivative_with, FracOrder, SampledFunction, TimeGrid};
use absubdiff_core::par::Exec;
use absubdiff_core::principles::{canonical_suite, run_suite, DEFAULT_TOL};
use absubdiff_core::solver::SolverConfig;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const POLICIES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn ab_derivative(c: &mut Criterion) {
    let f = SampledFunction::from_fn(TimeGrid::new(1.0, 2000).unwrap(), f64::sin).unwrap();
    let alpha = FracOrder::new(0.5).unwrap();
    let mut group = c.benchmark_group("ab_derivative_n2000");
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| ab_derivative_with(black_box(&f), alpha, exec))
        });
    }
    group.finish();
}

fn lemma_corpus(c: &mut Criterion) {
    let family = random_c1_family(1, 100, 4);
    let alphas: Vec<FracOrder> = [0.25, 0.5, 0.75]
        .map(|a| FracOrder::new(a).unwrap())
        .to_vec();
    let mut group = c.benchmark_group("lemma_corpus_100");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| check_corpus(black_box(&family), &alphas, exec))
        });
    }
    group.finish();
}

fn theorem_suite(c: &mut Criterion) {
    let suite = canonical_suite(40, 160);
    let cfg = SolverConfig::default();
    let mut group = c.benchmark_group("theorem_suite_40x160");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_suite(black_box(&suite), &cfg, DEFAULT_TOL, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, ab_derivative, lemma_corpus, theorem_suite);
criterion_main!(benches);
