//! Distributional checks of the spectral sampler beyond second moments.

use zagff::lattice::FieldConfig;
use zagff::sampler::{par_map_fields, sample_batch, SpectralSampler};
use zagff::seed::SeedPolicy;
use zagff::stats::{ks_statistic, std_normal_tail};

/// Standardized site values pass a KS test against the standard normal.
#[test]
fn standardized_site_value_is_gaussian() {
    let cfg = FieldConfig::new(3, 6).unwrap();
    let sampler = SpectralSampler::new(&cfg).unwrap();
    let scale = sampler.site_variance().sqrt();
    let policy = SeedPolicy::new(60001);
    let samples =
        par_map_fields(&cfg, &policy, 50_000, |_, field| field.values()[0] / scale).unwrap();
    let d = ks_statistic(&samples, |z| 1.0 - std_normal_tail(z)).unwrap();
    assert!(d <= 0.01, "KS distance {d} against N(0,1)");
}

/// Per-site means of a large batch vanish at the expected Monte Carlo rate.
#[test]
fn batch_per_site_means_vanish() {
    let cfg = FieldConfig::new(3, 8).unwrap();
    let policy = SeedPolicy::new(80001);
    let m = 10_000u64;
    let fields = sample_batch(&cfg, &policy, m).unwrap();
    let mut means = vec![0.0f64; cfg.num_sites()];
    for field in &fields {
        for (slot, v) in field.values().iter().enumerate() {
            means[slot] += v;
        }
    }
    let v = SpectralSampler::new(&cfg).unwrap().site_variance();
    let tol = 4.0 * (v / m as f64).sqrt();
    for (slot, sum) in means.iter().enumerate() {
        let mean = sum / m as f64;
        assert!(mean.abs() <= tol, "site {slot}: mean {mean} (tol {tol})");
    }
}
