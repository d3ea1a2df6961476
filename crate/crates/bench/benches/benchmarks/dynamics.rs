use std::hint::black_box;

use criterion::{criterion_group, BenchmarkId, Criterion};
use gamedyn::dynamics::{expdrl_field, hexpdrl_field};
use gamedyn::{integrate, FeedbackBlock, FirstOrder, FirstOrderParams, HigherOrder, HigherOrderState, IntegrationOptions};
use gamedyn_bench::{scores, suite};

fn fields(c: &mut Criterion) {
    let p = FirstOrderParams::new(1.0, 0.5).unwrap();
    let mut group = c.benchmark_group("field");
    for (name, g) in suite() {
        let z = scores(&g);
        let block = FeedbackBlock::high_pass(1.0, 1.0, g.dim()).unwrap();
        let state = HigherOrderState::new(z.clone());
        group.bench_function(BenchmarkId::new("first-order", name), |b| {
            b.iter(|| expdrl_field(black_box(&z), &g, &p).unwrap())
        });
        group.bench_function(BenchmarkId::new("higher-order", name), |b| {
            b.iter(|| hexpdrl_field(black_box(&state), &g, &p, &block).unwrap())
        });
    }
    group.finish();
}

fn rk4_runs(c: &mut Criterion) {
    let p = FirstOrderParams::new(1.0, 0.5).unwrap();
    let opts = IntegrationOptions::new(0.01, 50.0, 10);
    let mut group = c.benchmark_group("rk4_t50");
    group.sample_size(20);
    for (name, g) in suite() {
        let z = scores(&g);
        group.bench_function(BenchmarkId::new("first-order", name), |b| {
            b.iter(|| integrate(&FirstOrder::new(&g, p), black_box(&z), &opts).unwrap())
        });
        let sys = HigherOrder::new(&g, p, FeedbackBlock::high_pass(1.0, 1.0, g.dim()).unwrap()).unwrap();
        let y = HigherOrderState::new(z.clone()).stacked();
        group.bench_function(BenchmarkId::new("higher-order", name), |b| {
            b.iter(|| integrate(&sys, black_box(&y), &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, fields, rk4_runs);
