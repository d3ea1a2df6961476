use std::hint::black_box;

use criterion::{criterion_group, BenchmarkId, Criterion};
use gamedyn::analysis::{bifurcation_epsilon, classify, rest_point, RestPointOptions};
use gamedyn::{dynamics_jacobian, FeedbackBlock, FirstOrderParams};
use gamedyn_bench::{game, suite};

fn rest_points(c: &mut Criterion) {
    let opts = RestPointOptions::default();
    let mut group = c.benchmark_group("rest_point");
    for (name, g) in suite() {
        for eps in [1.0, 0.1] {
            group.bench_function(BenchmarkId::new(name, eps), |b| {
                b.iter(|| rest_point(black_box(&g), eps, None, &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn linear_analysis(c: &mut Criterion) {
    let mut group = c.benchmark_group("linear");
    for (name, g) in suite() {
        group.bench_function(BenchmarkId::new("classify", name), |b| b.iter(|| classify(black_box(&g), 50)));
        let z = rest_point(&g, 0.5, None, &RestPointOptions::default()).unwrap().z_star;
        let p = FirstOrderParams::new(1.0, 0.5).unwrap();
        group.bench_function(BenchmarkId::new("jacobian", name), |b| {
            b.iter(|| dynamics_jacobian(black_box(&z), &g, &p, None).unwrap())
        });
    }
    group.finish();
}

fn bifurcation(c: &mut Criterion) {
    let g = game("two_player_rps", Some(5.0));
    let p = FirstOrderParams::new(1.0, 1.0).unwrap();
    let block = FeedbackBlock::high_pass(1.0, 1.0, g.dim()).unwrap();
    let mut group = c.benchmark_group("bifurcation");
    group.sample_size(10);
    group.bench_function("two_player_rps/first-order", |b| {
        b.iter(|| bifurcation_epsilon(&g, &p, None, (0.2, 2.0), 1e-6).unwrap())
    });
    group.bench_function("two_player_rps/higher-order", |b| {
        b.iter(|| bifurcation_epsilon(&g, &p, Some(&block), (0.1, 2.0), 1e-6).unwrap())
    });
    group.finish();
}

criterion_group!(benches, rest_points, linear_analysis, bifurcation);
