use std::hint::black_box;

use bayestree::{BayesTree, MomentSpec};
use bayestree_bench::{beta_sample, query_points, SIZES};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn evaluate(c: &mut Criterion) {
    let engine = BayesTree::default();
    let mut group = c.benchmark_group("evaluate");
    group.sample_size(10);
    for n in SIZES {
        let data = beta_sample(n, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &data, |b, d| {
            b.iter(|| engine.evaluate(black_box(d), Some(0.3)).unwrap())
        });
    }
    group.finish();
}

fn local_queries(c: &mut Criterion) {
    let engine = BayesTree::default();
    let queries = query_points(1_000);
    let mut group = c.benchmark_group("density_1000_queries");
    group.sample_size(10);
    for n in SIZES {
        let index = engine.build_index(&beta_sample(n, 1)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &index, |b, idx| {
            b.iter(|| queries.iter().map(|&x| idx.density(x).unwrap().finite().unwrap()).sum::<f64>())
        });
    }
    group.finish();
}

fn index_build(c: &mut Criterion) {
    let engine = BayesTree::default();
    let data = beta_sample(10_000, 2);
    c.bench_function("build_index_10000", |b| b.iter(|| engine.build_index(black_box(&data)).unwrap()));
    let index = engine.build_index(&data).unwrap();
    c.bench_function("mean_10000", |b| b.iter(|| index.moment(MomentSpec::Power(1)).unwrap()));
}

criterion_group!(benches, evaluate, local_queries, index_build);
criterion_main!(benches);
