use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use mixreduce_core::encode::encode_table;
use mixreduce_core::forest::{fit_forest, ForestParams, Response};
use mixreduce_core::impute::{missforest_impute, ImputeParams};
use mixreduce_core::pca::{fit_pca, reduce};
use mixreduce_core::synthetic::{amputed_benchmark, mixed_benchmark};
use mixreduce_core::{rng, Matrix, WeightingScheme};
use rand::Rng;

fn forest(c: &mut Criterion) {
    let mut group = c.benchmark_group("forest_fit");
    for n in [200usize, 1000] {
        let mut r = rng::rng_from_seed(1);
        let x = Matrix::from_fn(n, 10, |_, _| r.random::<f64>());
        let y: Vec<f64> = (0..n).map(|i| x[(i, 0)] * 2.0 + x[(i, 3)]).collect();
        let response = Response::Regression(y);
        let params = ForestParams::default();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| fit_forest(black_box(&x), &response, &params).unwrap())
        });
    }
    group.finish();
}

fn imputation(c: &mut Criterion) {
    let b = amputed_benchmark(200, 0.1, 3).unwrap();
    let params = ImputeParams::default();
    c.bench_function("missforest_200x6", |bench| {
        bench.iter(|| missforest_impute(black_box(&b.amputed), &params).unwrap())
    });
}

fn pca(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit_pca");
    for (n, q) in [(200usize, 50usize), (1000, 200)] {
        let mut r = rng::rng_from_seed(2);
        let m = Matrix::from_fn(n, q, |_, _| r.random::<f64>());
        group.bench_with_input(BenchmarkId::from_parameter(format!("{n}x{q}")), &m, |b, m| {
            b.iter(|| fit_pca(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let complete = mixed_benchmark(500, 0.1, 4).unwrap();
    c.bench_function("encode_500x6", |b| {
        b.iter(|| encode_table(black_box(&complete), WeightingScheme::Famd, true).unwrap())
    });
    let b = amputed_benchmark(200, 0.1, 5).unwrap();
    let params = ImputeParams {
        max_iterations: 3,
        ..ImputeParams::default()
    };
    c.bench_function("reduce_200x6", |bench| {
        bench.iter(|| reduce(black_box(&b.amputed), &params, WeightingScheme::Famd, 0.9, true).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = forest, imputation, pca, pipeline
}
criterion_main!(benches);
