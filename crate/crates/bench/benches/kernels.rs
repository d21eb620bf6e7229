use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use zagff::greens::{green_zd, zero_average_green};
use zagff::lattice::{FieldConfig, LatticePoint};
use zagff::sampler::SpectralSampler;
use zagff::stats::{gumbel_cdf, gumbel_quantile, ks_statistic};

fn bench_sampler(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_field");
    for n in [8usize, 16, 32] {
        let cfg = FieldConfig::new(3, n).unwrap();
        let sampler = SpectralSampler::new(&cfg).unwrap();
        let mut seed = 0u64;
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                seed = seed.wrapping_add(1);
                black_box(sampler.sample(seed))
            })
        });
    }
    group.finish();
}

fn bench_green_table(c: &mut Criterion) {
    let mut group = c.benchmark_group("zero_average_green");
    for n in [16usize, 32] {
        let cfg = FieldConfig::new(3, n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| black_box(zero_average_green(&cfg).unwrap()))
        });
    }
    group.finish();
}

fn bench_quadrature(c: &mut Criterion) {
    // the memo cache would hide the cost; vary the displacement
    let mut r = 0i64;
    c.bench_function("green_zd_quadrature", |b| {
        b.iter(|| {
            r = (r + 1) % 30;
            black_box(green_zd(&LatticePoint::new(vec![r + 26, 1, 0]), 3).unwrap())
        })
    });
}

fn bench_ks(c: &mut Criterion) {
    let samples: Vec<f64> = (0..10_000)
        .map(|i| gumbel_quantile((i as f64 + 0.5) / 10_000.0))
        .collect();
    c.bench_function("ks_statistic_10k", |b| {
        b.iter(|| black_box(ks_statistic(&samples, gumbel_cdf).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_sampler,
    bench_green_table,
    bench_quadrature,
    bench_ks
);
criterion_main!(benches);
