use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hmeasure::geometry::{Configuration, Point};
use hmeasure::harmonic::{wos_estimate_with, wos_selfcheck_disk_with, Execution, WosParams};

fn star_estimate(c: &mut Criterion) {
    let mut group = c.benchmark_group("star_estimate");
    group.sample_size(10);
    let cfg = Configuration::extremal(3, 0.5, 0.0).unwrap();
    let params = WosParams::with_samples(50_000, 1);
    for (name, mode) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        group.bench_with_input(BenchmarkId::new(name, params.samples), &mode, |b, &mode| {
            b.iter(|| wos_estimate_with(&cfg, 1, &params, mode).unwrap())
        });
    }
    group.finish();
}

fn disk_selfcheck(c: &mut Criterion) {
    let mut group = c.benchmark_group("disk_selfcheck");
    group.sample_size(10);
    let z = Point::new(0.3, 0.4).unwrap();
    let params = WosParams::with_samples(50_000, 1);
    for (name, mode) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        group.bench_with_input(BenchmarkId::new(name, params.samples), &mode, |b, &mode| {
            b.iter(|| wos_selfcheck_disk_with(z, 1.0, &params, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, star_estimate, disk_selfcheck);
criterion_main!(benches);
