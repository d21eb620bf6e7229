//! `zagff verify`: the identity-check battery. Exit 0 iff every check
//! passes; `--inject-fault` perturbs a Green table entry by 1e-3 to prove
//! the battery detects corruption.

use crate::output::OutputDir;
use crate::{parse_usize_list, SCHEMA_VERSION};
use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use zagff::extremes::normalizing_constants;
use zagff::greens::oracles::{max_pseudo_inverse_deviation, pseudo_inverse_table};
use zagff::greens::{
    verify_markov_decomposition_torus, verify_spatial_markov_zd, zero_average_green, KilledGreenZd,
};
use zagff::lattice::{FieldConfig, LatticePoint, TorusPoint};
use zagff::region::{SiteSet, TorusSubset};
use zagff::rwalk::expected_exit_time_mc;
use zagff::sampler::{dense_covariance_factor, SpectralSampler};
use zagff::seed::SeedPolicy;
use zagff::tolerances::*;
use zagff::Result;

#[derive(Args)]
pub struct VerifyArgs {
    /// Lattice dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Torus sides for the exact-solve suite.
    #[arg(long)]
    n_list: Option<String>,
    /// Master seed for the Monte Carlo checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Replicates for the Monte Carlo checks.
    #[arg(long)]
    replicates: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = false)]
    force: bool,
    /// Optional JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Test hook: perturb G by 1e-3 so the battery must fail.
    #[arg(long, default_value_t = false, hide = true)]
    inject_fault: bool,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct VerifyFileConfig {
    d: Option<usize>,
    n_list: Option<Vec<usize>>,
    seed: Option<u64>,
    replicates: Option<u64>,
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct VerifyConfig {
    command: &'static str,
    d: usize,
    n_list: Vec<usize>,
    seed: u64,
    replicates: u64,
    inject_fault: bool,
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    statistic: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    schema_version: &'static str,
    command: &'static str,
    checks: Vec<Check>,
    all_pass: bool,
}

fn check(checks: &mut Vec<Check>, name: impl Into<String>, statistic: f64, tolerance: f64) {
    checks.push(Check {
        name: name.into(),
        statistic,
        tolerance,
        pass: statistic <= tolerance,
    });
}

pub fn run(args: VerifyArgs) -> Result<bool> {
    let file: VerifyFileConfig = super::load_config_file(args.config.as_deref())?;
    let d = args.d.or(file.d).unwrap_or(3);
    let n_list = match args.n_list {
        Some(raw) => parse_usize_list(&raw, "n-list")?,
        None => file.n_list.unwrap_or_else(|| vec![4, 5]),
    };
    let seed = args.seed.or(file.seed).unwrap_or(1);
    let replicates = args.replicates.or(file.replicates).unwrap_or(100_000);
    let out_path = args
        .out
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from("zagff-verify"));
    for &n in &n_list {
        FieldConfig::new(d, n)?;
    }

    let config = VerifyConfig {
        command: "verify",
        d,
        n_list: n_list.clone(),
        seed,
        replicates,
        inject_fault: args.inject_fault,
    };
    let policy = SeedPolicy::new(seed);
    let mut checks = Vec::new();

    // Z^d spatial Markov identities (quadrature-limited tolerance)
    let origin = LatticePoint::origin(d);
    let e1 = LatticePoint::unit(d, 0);
    let singleton = SiteSet::from_points(d, vec![origin.clone()])?;
    check(
        &mut checks,
        "markov-zd-singleton",
        verify_spatial_markov_zd(&singleton, &origin, &origin)?,
        MARKOV_ZD_TOL,
    );
    let l1 = SiteSet::l1_ball(d, 2)?;
    check(
        &mut checks,
        "markov-zd-l1-ball",
        verify_spatial_markov_zd(&l1, &origin, &e1)?,
        MARKOV_ZD_TOL,
    );
    let far = LatticePoint::new(
        (0..d)
            .map(|j| if j == 0 { 5 } else { 0 })
            .collect::<Vec<_>>(),
    );
    check(
        &mut checks,
        "markov-zd-outside-region",
        verify_spatial_markov_zd(&l1, &far, &origin)?,
        1e-12,
    );

    // per-n exact-solve suite
    for &n in &n_list {
        let cfg = FieldConfig::new(d, n)?;
        let mut table = zero_average_green(&cfg)?;
        if args.inject_fault {
            table.perturb_entry(1, 1e-3);
        }
        check(
            &mut checks,
            format!("table-row-sum-n{n}"),
            table.row_sum().abs(),
            TABLE_ZERO_SUM_TOL * cfg.num_sites() as f64,
        );
        check(
            &mut checks,
            format!("table-symmetry-n{n}"),
            table.max_symmetry_residual(),
            1e-11,
        );
        if cfg.num_sites() <= 512 {
            let pinv = pseudo_inverse_table(&cfg)?;
            check(
                &mut checks,
                format!("spectral-vs-pseudoinverse-n{n}"),
                max_pseudo_inverse_deviation(&table, &pinv),
                PSEUDO_INVERSE_MAX_DEV,
            );
        }
        // torus Markov decomposition on the image of [1, n-2]^d and on the
        // complement of one site
        let boxed = TorusSubset::box_image(&cfg, 1, n as i64 - 2)?;
        let x = TorusPoint::new(vec![1; d], &cfg)?;
        check(
            &mut checks,
            format!("markov-torus-box-n{n}"),
            verify_markov_decomposition_torus(&table, &boxed, &x, &x)?,
            MARKOV_TORUS_TOL,
        );
        let hole = TorusPoint::new(vec![(n / 2) as i64; d], &cfg)?;
        let complement = TorusSubset::complement_of(&cfg, &hole)?;
        let y = TorusPoint::new(vec![0; d], &cfg)?;
        check(
            &mut checks,
            format!("markov-torus-complement-n{n}"),
            verify_markov_decomposition_torus(&table, &complement, &y, &x)?,
            MARKOV_TORUS_TOL,
        );
    }

    // sampler oracles at n = 4
    let cfg4 = FieldConfig::new(d, 4)?;
    let mut table4 = zero_average_green(&cfg4)?;
    if args.inject_fault {
        table4.perturb_entry(1, 1e-3);
    }
    let factor = dense_covariance_factor(&table4)?;
    let product = &factor * factor.transpose();
    let mut factor_residual = 0.0f64;
    for i in 0..cfg4.num_sites() {
        let xi = cfg4.site_at(i);
        for j in 0..cfg4.num_sites() {
            factor_residual =
                factor_residual.max((product[(i, j)] - table4.value(&xi, &cfg4.site_at(j))).abs());
        }
    }
    check(
        &mut checks,
        "sampler-covariance-factor",
        factor_residual,
        FACTOR_RESIDUAL_TOL,
    );
    let cfg8 = FieldConfig::new(d, 8)?;
    let sampler = SpectralSampler::new(&cfg8)?;
    let mut zero_sum_worst = 0.0f64;
    for i in 0..20u64 {
        let field = sampler.sample(policy.stream_seed(i));
        let scale = cfg8.num_sites() as f64 * field.max_abs();
        zero_sum_worst = zero_sum_worst.max(field.sum().abs() / scale);
    }
    check(
        &mut checks,
        "sampler-zero-sum-n8",
        zero_sum_worst,
        FIELD_ZERO_SUM_REL,
    );
    // constants identity a * b = v
    let constants = normalizing_constants(cfg8.num_sites(), GOLDEN_G0_D3)?;
    check(
        &mut checks,
        "constants-product-identity",
        (constants.a() * constants.b() - GOLDEN_G0_D3).abs(),
        f64::EPSILON * GOLDEN_G0_D3,
    );

    // exit-time bound at n = 10 (box [1, n-2]^d from the center)
    let n_exit = 10usize;
    let region = SiteSet::cube(d, 1, n_exit as i64 - 2)?;
    let center = LatticePoint::new(vec![(n_exit / 2) as i64; d]);
    let exact = KilledGreenZd::new(region.clone())?.expected_exit_time(&center);
    let mc = expected_exit_time_mc(&center, &region, replicates, &policy, DEFAULT_STEP_CAP)?;
    check(
        &mut checks,
        "exit-time-mc-vs-solve",
        (mc.mean - exact).abs(),
        3.0 * mc.std_error,
    );
    let bound = (n_exit as f64 * (d as f64).sqrt() + 2.0).powi(2);
    check(&mut checks, "exit-time-paper-bound", mc.mean, bound);

    let all_pass = checks.iter().all(|c| c.pass);
    let out = OutputDir::create(&out_path, args.force)?;
    out.write_json("config.json", &config)?;
    out.write_json(
        "report.json",
        &VerifyReport {
            schema_version: SCHEMA_VERSION,
            command: "verify",
            checks,
            all_pass,
        },
    )?;
    Ok(all_pass)
}
