use std::hint::black_box;

use criterion::{criterion_group, BenchmarkId, Criterion};
use gamedyn::{bregman_lse, softmax, softmax_jacobian, Temperature};
use nalgebra::DVector;

fn softmax_sizes(c: &mut Criterion) {
    let eps = Temperature::new(0.1).unwrap();
    let mut group = c.benchmark_group("softmax");
    for n in [3usize, 10, 100] {
        let z = DVector::from_fn(n, |i, _| (i as f64 * 0.37).sin());
        let counts = [n];
        group.bench_with_input(BenchmarkId::new("block", n), &z, |b, z| {
            b.iter(|| softmax(black_box(z), eps, &counts).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("jacobian", n), &z, |b, z| {
            b.iter(|| softmax_jacobian(black_box(z.as_slice()), eps).unwrap())
        });
    }
    group.finish();
}

fn bregman(c: &mut Criterion) {
    let eps = Temperature::new(0.5).unwrap();
    let z = DVector::from_fn(6, |i, _| i as f64 * 0.1);
    let r = DVector::from_element(6, 0.3);
    c.bench_function("bregman_lse/2x3", |b| {
        b.iter(|| bregman_lse(black_box(&z), black_box(&r), eps, &[3, 3]).unwrap())
    });
}

criterion_group!(benches, softmax_sizes, bregman);
