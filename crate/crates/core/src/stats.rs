//! Statistical verification battery for the extremal limit: Gumbel goodness
//! of fit of rescaled maxima, Poisson structure of exceedance counts,
//! Laplace-functional comparison, and boundary exceedance rates.
//!
//! Every experiment also reports an exact finite-N Gaussian-tail prediction
//! where one exists, so finite-size bias is distinguishable from
//! implementation error: the marginal of each site is exactly
//! `N(0, v_n)` with `v_n = G(0,0)` from the spectral table, and by linearity
//! the expected exceedance count is `N Phibar(u_N(delta) / sqrt(v_n))`
//! regardless of dependence.

use crate::error::{Error, Result};
use crate::extremes::{field_maximum, NormalizingConstants, PointPattern};
use crate::lattice::{bulk_region_contains_beta, representative, FieldConfig};
use crate::sampler::{par_map_fields, SpectralSampler};
use crate::seed::SeedPolicy;
use serde::{Deserialize, Serialize};

/// Upper tail of the standard normal, `P(N(0,1) > t)`.
pub fn std_normal_tail(t: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(t / std::f64::consts::SQRT_2)
}

/// The Gumbel distribution function `exp(-e^{-z})`.
pub fn gumbel_cdf(z: f64) -> f64 {
    (-(-z).exp()).exp()
}

/// Analytic inverse of [`gumbel_cdf`] on `(0, 1)`.
pub fn gumbel_quantile(p: f64) -> f64 {
    -(-p.ln()).ln()
}

/// Exact Kolmogorov-Smirnov statistic `sup_z |ECDF(z) - F(z)|`, evaluated at
/// the jump points: `max_i max(i/M - F(z_(i)), F(z_(i)) - (i-1)/M)`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let m = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &z) in sorted.iter().enumerate() {
        let f = cdf(z);
        d = d.max((i as f64 + 1.0) / m - f).max(f - i as f64 / m);
    }
    Ok(d)
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Variance-to-mean ratio of count data (1 for Poisson).
pub fn dispersion_index(counts: &[u32]) -> f64 {
    let m = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / m;
    let var = counts
        .iter()
        .map(|&c| (c as f64 - mean) * (c as f64 - mean))
        .sum::<f64>()
        / (m - 1.0);
    var / mean
}

/// Max absolute pairwise Pearson correlation between cell-count columns.
/// `cells[replicate][cell]`.
pub fn max_pairwise_correlation(cells: &[Vec<u32>]) -> f64 {
    if cells.is_empty() || cells[0].len() < 2 {
        return 0.0;
    }
    let m = cells.len() as f64;
    let k = cells[0].len();
    let means: Vec<f64> = (0..k)
        .map(|j| cells.iter().map(|row| row[j] as f64).sum::<f64>() / m)
        .collect();
    let sds: Vec<f64> = (0..k)
        .map(|j| {
            (cells
                .iter()
                .map(|row| (row[j] as f64 - means[j]).powi(2))
                .sum::<f64>()
                / (m - 1.0))
                .sqrt()
        })
        .collect();
    let mut worst = 0.0f64;
    for a in 0..k {
        for b in (a + 1)..k {
            let cov = cells
                .iter()
                .map(|row| (row[a] as f64 - means[a]) * (row[b] as f64 - means[b]))
                .sum::<f64>()
                / (m - 1.0);
            if sds[a] > 0.0 && sds[b] > 0.0 {
                worst = worst.max((cov / (sds[a] * sds[b])).abs());
            }
        }
    }
    worst
}

/// Gumbel goodness-of-fit of rescaled maxima.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GumbelReport {
    pub d: usize,
    pub n: usize,
    pub replicates: u64,
    pub ks_distance: f64,
    /// `(p, ECDF(q_p) - p)` at fixed probe probabilities.
    pub quantile_deviations: Vec<(f64, f64)>,
    pub a: f64,
    pub b: f64,
    pub v: f64,
}

pub struct GumbelExperiment {
    pub report: GumbelReport,
    /// Per-replicate rescaled maxima, indexed by replicate.
    pub rescaled_maxima: Vec<f64>,
}

/// Samples `replicates` fields and tests their rescaled maxima against the
/// Gumbel law.
pub fn gumbel_experiment(
    cfg: &FieldConfig,
    constants: &NormalizingConstants,
    replicates: u64,
    policy: &SeedPolicy,
) -> Result<GumbelExperiment> {
    check_replicates(replicates)?;
    check_constants(cfg, constants)?;
    let maxima = par_map_fields(cfg, policy, replicates, |_, field| {
        field_maximum(field, constants).2
    })?;
    let ks_distance = ks_statistic(&maxima, gumbel_cdf)?;
    let probes = [0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95];
    let m = maxima.len() as f64;
    let quantile_deviations = probes
        .iter()
        .map(|&p| {
            let q = gumbel_quantile(p);
            let ecdf = maxima.iter().filter(|&&z| z <= q).count() as f64 / m;
            (p, ecdf - p)
        })
        .collect();
    Ok(GumbelExperiment {
        report: GumbelReport {
            d: cfg.dimension(),
            n: cfg.side(),
            replicates,
            ks_distance,
            quantile_deviations,
            a: constants.a(),
            b: constants.b(),
            v: constants.v(),
        },
        rescaled_maxima: maxima,
    })
}

/// Poisson structure of exceedance counts above `u_N(delta)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoissonReport {
    pub d: usize,
    pub n: usize,
    pub delta: f64,
    pub replicates: u64,
    pub threshold: f64,
    /// Sample mean of the per-replicate total count.
    pub empirical_mean: f64,
    pub std_error: f64,
    /// `N Phibar(u_N(delta)/sqrt(v_n))` with the exact marginal variance
    /// `v_n = G(0,0)`; exact for the mean by linearity.
    pub prediction_exact_marginal: f64,
    /// Same formula with the limit variance `v` in place of `v_n`.
    pub prediction_limit_variance: f64,
    /// The n -> infinity intensity mass `e^{-delta}`.
    pub limit_mean: f64,
    pub site_variance: f64,
    pub dispersion: f64,
    pub max_cell_correlation: f64,
    pub split: Vec<usize>,
}

pub struct PoissonExperiment {
    pub report: PoissonReport,
    /// Per-replicate total exceedance counts, indexed by replicate.
    pub totals: Vec<u32>,
    /// Per-replicate per-cell counts.
    pub cell_counts: Vec<Vec<u32>>,
}

/// Counts exceedances per replicate, overall and per congruent split cell.
/// `split` gives the number of cells along each axis (length `d`).
pub fn poisson_experiment(
    cfg: &FieldConfig,
    constants: &NormalizingConstants,
    delta: f64,
    replicates: u64,
    policy: &SeedPolicy,
    split: &[usize],
) -> Result<PoissonExperiment> {
    check_replicates(replicates)?;
    check_constants(cfg, constants)?;
    if split.len() != cfg.dimension() || split.contains(&0) {
        return Err(Error::InvalidParameter {
            name: "split",
            reason: format!("need {} positive cell counts", cfg.dimension()),
        });
    }
    let n = cfg.side();
    if split.iter().any(|&s| !n.is_multiple_of(s)) {
        return Err(Error::InvalidParameter {
            name: "split",
            reason: format!("cells must be congruent: each split must divide n = {n}"),
        });
    }
    let num_cells: usize = split.iter().product();
    let threshold = constants.threshold(delta);

    // cell of a site: along axis j, cell floor(coord * split_j / n)
    let cell_of = |site_idx: usize| -> usize {
        let site = cfg.site_at(site_idx);
        let mut cell = 0usize;
        for (j, &c) in site.coords().iter().enumerate() {
            cell = cell * split[j] + (c as usize * split[j]) / n;
        }
        cell
    };
    let cell_table: Vec<u32> = (0..cfg.num_sites()).map(|i| cell_of(i) as u32).collect();

    let per_replicate: Vec<(u32, Vec<u32>)> =
        par_map_fields(cfg, policy, replicates, |_, field| {
            let mut cells = vec![0u32; num_cells];
            let mut total = 0u32;
            for (idx, &v) in field.values().iter().enumerate() {
                if v > threshold {
                    total += 1;
                    cells[cell_table[idx] as usize] += 1;
                }
            }
            (total, cells)
        })?;
    let totals: Vec<u32> = per_replicate.iter().map(|(t, _)| *t).collect();
    let cell_counts: Vec<Vec<u32>> = per_replicate.into_iter().map(|(_, c)| c).collect();

    let as_f64: Vec<f64> = totals.iter().map(|&t| t as f64).collect();
    let (empirical_mean, std_error) = mean_and_se(&as_f64);
    let sampler = SpectralSampler::new(cfg)?;
    let v_n = sampler.site_variance();
    let n_sites = cfg.num_sites() as f64;
    Ok(PoissonExperiment {
        report: PoissonReport {
            d: cfg.dimension(),
            n,
            delta,
            replicates,
            threshold,
            empirical_mean,
            std_error,
            prediction_exact_marginal: n_sites * std_normal_tail(threshold / v_n.sqrt()),
            prediction_limit_variance: n_sites * std_normal_tail(threshold / constants.v().sqrt()),
            limit_mean: (-delta).exp(),
            site_variance: v_n,
            dispersion: dispersion_index(&totals),
            max_cell_correlation: max_pairwise_correlation(&cell_counts),
            split: split.to_vec(),
        },
        totals,
        cell_counts,
    })
}

/// Indicator-type test function `c * 1_{B x (delta, inf]}` with `B` an
/// axis-aligned box in `[0,1)^d`; the limit Laplace functional is closed
/// form for this family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndicatorBox {
    pub scale: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub delta: f64,
}

impl IndicatorBox {
    /// Full-space box at level `delta` with mass `c`.
    pub fn full(d: usize, scale: f64, delta: f64) -> Self {
        IndicatorBox {
            scale,
            lower: vec![0.0; d],
            upper: vec![1.0; d],
            delta,
        }
    }

    pub fn evaluate(&self, location: &[f64], height: f64) -> f64 {
        let inside = location
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(x, (lo, hi))| lo <= x && x < hi);
        if inside && height > self.delta {
            self.scale
        } else {
            0.0
        }
    }

    fn box_volume(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi.min(1.0) - lo.max(0.0)).max(0.0))
            .product()
    }

    /// Limit value `exp(-(1 - e^{-c}) vol(B) e^{-delta})` of
    /// `E[exp(-eta(f))]` under the Poisson limit with intensity
    /// `dt x e^{-z} dz`.
    pub fn theoretical_laplace(&self) -> f64 {
        (-(1.0 - (-self.scale).exp()) * self.box_volume() * (-self.delta).exp()).exp()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaplaceReport {
    pub test_function: IndicatorBox,
    pub replicates: u64,
    pub empirical: f64,
    pub std_error: f64,
    pub theoretical: f64,
}

/// Compares the empirical Laplace functional `mean(exp(-sum_points f))`
/// over stored patterns with the closed-form limit.
pub fn laplace_experiment(patterns: &[PointPattern], f: &IndicatorBox) -> Result<LaplaceReport> {
    if patterns.is_empty() {
        return Err(Error::EmptySample);
    }
    for p in patterns {
        if f.delta <= p.floor {
            return Err(Error::InvalidParameter {
                name: "test_function",
                reason: format!(
                    "support level {} not above the pattern floor {}",
                    f.delta, p.floor
                ),
            });
        }
    }
    let values: Vec<f64> = patterns
        .iter()
        .map(|pattern| {
            let mass: f64 = pattern
                .points
                .iter()
                .map(|pt| f.evaluate(&pt.location, pt.height))
                .sum();
            (-mass).exp()
        })
        .collect();
    let (empirical, std_error) = mean_and_se(&values);
    Ok(LaplaceReport {
        test_function: f.clone(),
        replicates: patterns.len() as u64,
        empirical,
        std_error,
        theoretical: f.theoretical_laplace(),
    })
}

/// Empirical Laplace functional for an arbitrary nonnegative test function
/// (no closed-form target). Returns `(mean, standard error)`.
pub fn laplace_empirical<F>(patterns: &[PointPattern], f: F) -> Result<(f64, f64)>
where
    F: Fn(&[f64], f64) -> f64,
{
    if patterns.is_empty() {
        return Err(Error::EmptySample);
    }
    let values: Vec<f64> = patterns
        .iter()
        .map(|pattern| {
            let mass: f64 = pattern
                .points
                .iter()
                .map(|pt| f(&pt.location, pt.height))
                .sum();
            (-mass).exp()
        })
        .collect();
    Ok(mean_and_se(&values))
}

/// Exceedance rate outside the bulk region.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub d: usize,
    pub n: usize,
    pub delta: f64,
    pub beta: f64,
    pub replicates: u64,
    /// Number of sites outside the bulk box.
    pub boundary_sites: usize,
    /// Fraction of replicates with at least one boundary exceedance.
    pub rate: f64,
    pub std_error: f64,
    /// `min(1, |V \ R| Phibar(u_N(delta)/sqrt(v_n)))`.
    pub union_bound: f64,
}

/// Fraction of replicates in which some site outside the bulk region has
/// rescaled height above `delta`, together with its union-bound oracle.
pub fn boundary_exceedance_rate(
    cfg: &FieldConfig,
    constants: &NormalizingConstants,
    delta: f64,
    replicates: u64,
    policy: &SeedPolicy,
    beta: f64,
) -> Result<BoundaryReport> {
    check_replicates(replicates)?;
    check_constants(cfg, constants)?;
    if crate::lattice::bulk_region_size(cfg, beta) == 0 {
        return Err(Error::EmptyBulkRegion { n: cfg.side() });
    }
    let boundary: Vec<bool> = (0..cfg.num_sites())
        .map(|idx| {
            let rep = representative(&cfg.site_at(idx));
            !bulk_region_contains_beta(&rep, cfg, beta)
        })
        .collect();
    let boundary_sites = boundary.iter().filter(|&&b| b).count();
    let threshold = constants.threshold(delta);
    let flags: Vec<bool> = par_map_fields(cfg, policy, replicates, |_, field| {
        field
            .values()
            .iter()
            .zip(&boundary)
            .any(|(&v, &out)| out && v > threshold)
    })?;
    let hits = flags.iter().filter(|&&f| f).count() as f64;
    let m = replicates as f64;
    let rate = hits / m;
    let sampler = SpectralSampler::new(cfg)?;
    let tail = std_normal_tail(threshold / sampler.site_variance().sqrt());
    Ok(BoundaryReport {
        d: cfg.dimension(),
        n: cfg.side(),
        delta,
        beta,
        replicates,
        boundary_sites,
        rate,
        std_error: (rate * (1.0 - rate) / m).sqrt(),
        union_bound: (boundary_sites as f64 * tail).min(1.0),
    })
}

fn check_replicates(replicates: u64) -> Result<()> {
    if replicates < 100 {
        return Err(Error::InvalidParameter {
            name: "replicates",
            reason: format!("need at least 100, got {replicates}"),
        });
    }
    Ok(())
}

fn check_constants(cfg: &FieldConfig, constants: &NormalizingConstants) -> Result<()> {
    if constants.n_sites() != cfg.num_sites() {
        return Err(Error::InvalidParameter {
            name: "constants",
            reason: format!(
                "constants built for N = {}, torus has N = {}",
                constants.n_sites(),
                cfg.num_sites()
            ),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremes::{extract_point_pattern, normalizing_constants};
    use crate::seed::rng_from_seed;
    use crate::tolerances::GOLDEN_G0_D3;
    use rand::Rng;
    use rand_distr::Poisson;

    #[test]
    fn gumbel_cdf_values() {
        assert!((gumbel_cdf(0.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((gumbel_cdf(-(2.0f64.ln().ln())) - 0.5).abs() < 1e-15);
        assert!((gumbel_cdf(10.0) - 0.9999546011).abs() < 1e-9);
        assert!(gumbel_cdf(-10.0) < 1e-9000_f64.max(1e-300));
    }

    #[test]
    fn gumbel_quantile_inverts_cdf() {
        for i in 1..=999 {
            let p = i as f64 / 1000.0;
            assert!((gumbel_cdf(gumbel_quantile(p)) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn ks_single_sample_at_median() {
        let d = ks_statistic(&[gumbel_quantile(0.5)], gumbel_cdf).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ks_exact_quantile_grid() {
        // samples at F^{-1}((i - 0.5)/M) give D = 0.5/M exactly
        let m = 100;
        let samples: Vec<f64> = (1..=m)
            .map(|i| gumbel_quantile((i as f64 - 0.5) / m as f64))
            .collect();
        let d = ks_statistic(&samples, gumbel_cdf).unwrap();
        assert!((d - 0.005).abs() < 1e-12, "D = {d}");
    }

    #[test]
    fn ks_invariant_under_reordering() {
        let mut samples: Vec<f64> = (0..500)
            .map(|i| gumbel_quantile((i as f64 + 0.7) / 501.0))
            .collect();
        let d1 = ks_statistic(&samples, gumbel_cdf).unwrap();
        samples.reverse();
        samples.swap(3, 250);
        let d2 = ks_statistic(&samples, gumbel_cdf).unwrap();
        assert_eq!(d1, d2);
        assert!(ks_statistic(&[], gumbel_cdf).is_err());
    }

    #[test]
    fn ks_matches_brute_force_grid() {
        let mut rng = rng_from_seed(5);
        let samples: Vec<f64> = (0..200)
            .map(|_| gumbel_quantile(rng.random::<f64>().clamp(1e-9, 1.0 - 1e-9)))
            .collect();
        let exact = ks_statistic(&samples, gumbel_cdf).unwrap();
        let mut sorted = samples.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let m = sorted.len() as f64;
        let mut brute = 0.0f64;
        for i in 0..100_000 {
            let z = -4.0 + 14.0 * i as f64 / 100_000.0;
            let ecdf = sorted.partition_point(|&s| s <= z) as f64 / m;
            brute = brute.max((ecdf - gumbel_cdf(z)).abs());
        }
        assert!(exact >= brute - 1e-12);
        assert!(exact - brute <= 1.0 / m);
    }

    #[test]
    fn ks_on_synthetic_gumbel_draws() {
        let mut rng = rng_from_seed(4242);
        let samples: Vec<f64> = (0..10_000)
            .map(|_| gumbel_quantile(rng.random::<f64>().clamp(1e-12, 1.0 - 1e-12)))
            .collect();
        let d = ks_statistic(&samples, gumbel_cdf).unwrap();
        // 1% critical value 1.63/sqrt(M) ~ 0.0163
        assert!(d <= 0.02, "D = {d}");
    }

    #[test]
    fn normal_tail_reference_values() {
        // the erfc backend is good to ~1e-10 relative, ample for count
        // predictions with statistical errors orders of magnitude larger
        assert!((std_normal_tail(0.0) - 0.5).abs() < 1e-15);
        assert!((std_normal_tail(1.0) / 0.15865525393145707 - 1.0).abs() < 1e-9);
        assert!((std_normal_tail(4.0) / 3.167124183311998e-5 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dispersion_of_synthetic_poisson_counts() {
        let mut rng = rng_from_seed(2024);
        let pois = Poisson::new(1.0).unwrap();
        let counts: Vec<u32> = (0..10_000).map(|_| rng.sample(pois) as u32).collect();
        let idx = dispersion_index(&counts);
        assert!((0.94..=1.06).contains(&idx), "dispersion {idx}");
    }

    #[test]
    fn laplace_closed_form_and_limits() {
        let f = IndicatorBox::full(3, 1.0, 0.0);
        // exp(-(1 - e^{-1})) at c = 1, delta = 0
        assert!((f.theoretical_laplace() - 0.5314636054).abs() < 1e-9);
        // c -> infinity recovers the Gumbel cdf at delta
        for delta in [-1.0, 0.0, 2.0] {
            let f = IndicatorBox::full(3, 60.0, delta);
            assert!((f.theoretical_laplace() - gumbel_cdf(delta)).abs() < 1e-12);
        }
        // f = 0 gives exactly 1
        let zero = IndicatorBox::full(3, 0.0, 0.0);
        assert_eq!(zero.theoretical_laplace(), 1.0);
    }

    #[test]
    fn laplace_on_empty_patterns_is_one() {
        let cfg = FieldConfig::new(3, 4).unwrap();
        let constants = normalizing_constants(64, GOLDEN_G0_D3).unwrap();
        let field = crate::sampler::TorusField::from_values(cfg, vec![0.0; 64], 0).unwrap();
        let floor = constants.rescale(0.0) + 0.5;
        let pattern = extract_point_pattern(&field, &constants, floor).unwrap();
        assert!(pattern.is_empty());
        let report =
            laplace_experiment(&[pattern], &IndicatorBox::full(3, 1.0, floor + 1.0)).unwrap();
        assert_eq!(report.empirical, 1.0);
    }

    #[test]
    fn laplace_rejects_support_below_floor() {
        let cfg = FieldConfig::new(3, 4).unwrap();
        let constants = normalizing_constants(64, GOLDEN_G0_D3).unwrap();
        let field = crate::sampler::sample_field(&cfg, 3).unwrap();
        let pattern = extract_point_pattern(&field, &constants, -2.0).unwrap();
        let f = IndicatorBox::full(3, 1.0, -3.0);
        assert!(laplace_experiment(&[pattern], &f).is_err());
    }

    #[test]
    fn poisson_experiment_threshold_beyond_reach() {
        let cfg = FieldConfig::new(3, 6).unwrap();
        let constants = normalizing_constants(216, GOLDEN_G0_D3).unwrap();
        let out = poisson_experiment(&cfg, &constants, 20.0, 200, &SeedPolicy::new(8), &[2, 1, 1])
            .unwrap();
        assert_eq!(out.report.empirical_mean, 0.0);
    }

    #[test]
    fn poisson_experiment_counts_are_consistent() {
        let cfg = FieldConfig::new(3, 6).unwrap();
        let constants = normalizing_constants(216, GOLDEN_G0_D3).unwrap();
        let out = poisson_experiment(
            &cfg,
            &constants,
            -2.0,
            300,
            &SeedPolicy::new(12),
            &[2, 1, 1],
        )
        .unwrap();
        for (total, cells) in out.totals.iter().zip(&out.cell_counts) {
            assert_eq!(*total, cells.iter().sum::<u32>());
        }
        // empirical mean should track the exact finite-N marginal prediction
        let diff = (out.report.empirical_mean - out.report.prediction_exact_marginal).abs();
        assert!(
            diff <= 4.0 * out.report.std_error.max(0.05),
            "mean {} vs prediction {}",
            out.report.empirical_mean,
            out.report.prediction_exact_marginal
        );
    }

    #[test]
    fn boundary_rate_trivial_cases() {
        let cfg = FieldConfig::new(3, 32).unwrap();
        let constants = normalizing_constants(cfg.num_sites(), GOLDEN_G0_D3).unwrap();
        let report =
            boundary_exceedance_rate(&cfg, &constants, 20.0, 100, &SeedPolicy::new(3), 0.75)
                .unwrap();
        assert_eq!(report.rate, 0.0);
        // empty bulk region rejected (16^{3/4} = 8 makes (8, 8] empty)
        let small = FieldConfig::new(3, 16).unwrap();
        let c2 = normalizing_constants(small.num_sites(), GOLDEN_G0_D3).unwrap();
        assert!(matches!(
            boundary_exceedance_rate(&small, &c2, 0.0, 100, &SeedPolicy::new(3), 0.75),
            Err(Error::EmptyBulkRegion { n: 16 })
        ));
    }

    #[test]
    fn reports_round_trip_through_json() {
        let report = GumbelReport {
            d: 3,
            n: 8,
            replicates: 100,
            ks_distance: 0.05,
            quantile_deviations: vec![(0.5, -0.01)],
            a: 0.42,
            b: 3.59,
            v: GOLDEN_G0_D3,
        };
        let json = serde_json::to_string(&report).unwrap();
        let back: GumbelReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report.ks_distance, back.ks_distance);
        assert_eq!(report.quantile_deviations, back.quantile_deviations);
    }
}
