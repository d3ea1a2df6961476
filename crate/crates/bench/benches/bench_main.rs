mod benchmarks;

criterion::criterion_main!(
    benchmarks::choice::benches,
    benchmarks::dynamics::benches,
    benchmarks::analysis::benches,
);
