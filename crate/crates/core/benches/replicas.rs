use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use varmotion::mc::{run_replicas, run_replicas_seq};
use varmotion::planar::{sample_planar_endpoint, PlanarParams};
use varmotion::telegraph::{sample_endpoint, TelegraphParams};

fn telegraph(c: &mut Criterion) {
    let params = TelegraphParams::new(5.0, 1.0).unwrap();
    let mut group = c.benchmark_group("telegraph_endpoints");
    for n in [1_000usize, 20_000] {
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| run_replicas(n, black_box(7), |rng| sample_endpoint(&params, 1.0, rng)))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| run_replicas_seq(n, black_box(7), |rng| sample_endpoint(&params, 1.0, rng)))
        });
    }
    group.finish();
}

fn planar(c: &mut Criterion) {
    let params = PlanarParams::new(200.0, 1.0, 0.3).unwrap();
    let mut group = c.benchmark_group("planar_endpoints");
    group.sample_size(20);
    let n = 5_000;
    group.bench_function("parallel", |b| {
        b.iter(|| run_replicas(n, black_box(11), |rng| sample_planar_endpoint(&params, 1.0, rng).u))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| run_replicas_seq(n, black_box(11), |rng| sample_planar_endpoint(&params, 1.0, rng).u))
    });
    group.finish();
}

criterion_group!(benches, telegraph, planar);
criterion_main!(benches);
