//! `zagff extremes`: the full extreme-value battery at one configuration,
//! with per-replicate CSVs for offline plotting.

use crate::output::OutputDir;
use crate::{parse_usize_list, SCHEMA_VERSION};
use clap::Args;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::PathBuf;
use zagff::extremes::{extract_point_pattern, normalizing_constants};
use zagff::sampler::par_map_fields;
use zagff::seed::SeedPolicy;
use zagff::stats::{
    boundary_exceedance_rate, gumbel_experiment, laplace_experiment, poisson_experiment,
    BoundaryReport, GumbelReport, IndicatorBox, LaplaceReport, PoissonReport,
};
use zagff::tolerances::{DEFAULT_BULK_BETA, DEFAULT_PATTERN_FLOOR, GOLDEN_G0_D3};
use zagff::{Error, FieldConfig, Result};

#[derive(Args)]
pub struct ExtremesArgs {
    /// Lattice dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Torus side length.
    #[arg(long)]
    n: Option<usize>,
    /// Replicates per experiment.
    #[arg(long)]
    replicates: Option<u64>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Rescaled threshold level for counts and the Laplace test function.
    #[arg(long)]
    delta: Option<f64>,
    /// Storage floor for exported point patterns.
    #[arg(long)]
    floor: Option<f64>,
    /// Cells per axis for the Poisson split, comma-separated.
    #[arg(long)]
    split: Option<String>,
    /// Bulk-region exponent.
    #[arg(long)]
    beta: Option<f64>,
    /// Export the point patterns of the first K replicates.
    #[arg(long)]
    emit_patterns: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = false)]
    force: bool,
    /// Optional JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ExtremesFileConfig {
    d: Option<usize>,
    n: Option<usize>,
    replicates: Option<u64>,
    seed: Option<u64>,
    delta: Option<f64>,
    floor: Option<f64>,
    split: Option<Vec<usize>>,
    beta: Option<f64>,
    emit_patterns: Option<u64>,
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct ExtremesConfig {
    command: &'static str,
    d: usize,
    n: usize,
    replicates: u64,
    seed: u64,
    delta: f64,
    floor: f64,
    split: Vec<usize>,
    beta: f64,
    emit_patterns: u64,
    v: f64,
    a: f64,
    b: f64,
}

#[derive(Serialize)]
struct ExtremesReport {
    schema_version: &'static str,
    command: &'static str,
    gumbel: GumbelReport,
    poisson: PoissonReport,
    laplace: LaplaceReport,
    /// Absent when the bulk region is empty at this n.
    boundary: Option<BoundaryReport>,
    boundary_skipped_reason: Option<String>,
}

pub fn run(args: ExtremesArgs) -> Result<bool> {
    let file: ExtremesFileConfig = super::load_config_file(args.config.as_deref())?;
    let d = args.d.or(file.d).unwrap_or(3);
    let n = args.n.or(file.n).ok_or(Error::InvalidParameter {
        name: "n",
        reason: "pass --n (or set it in the config file)".into(),
    })?;
    let replicates = args.replicates.or(file.replicates).unwrap_or(1000);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let delta = args.delta.or(file.delta).unwrap_or(0.0);
    let floor = args.floor.or(file.floor).unwrap_or(DEFAULT_PATTERN_FLOOR);
    let split = match args.split {
        Some(raw) => parse_usize_list(&raw, "split")?,
        None => file.split.unwrap_or_else(|| {
            let mut s = vec![1usize; d];
            s[0] = 2;
            s
        }),
    };
    let beta = args.beta.or(file.beta).unwrap_or(DEFAULT_BULK_BETA);
    let emit_patterns = args
        .emit_patterns
        .or(file.emit_patterns)
        .unwrap_or(1)
        .min(replicates);

    let cfg = FieldConfig::new(d, n)?;
    let constants = normalizing_constants(cfg.num_sites(), GOLDEN_G0_D3)?;
    let policy = SeedPolicy::new(seed);
    if delta <= floor {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("delta ({delta}) must lie above the pattern floor ({floor})"),
        });
    }

    let config = ExtremesConfig {
        command: "extremes",
        d,
        n,
        replicates,
        seed,
        delta,
        floor,
        split: split.clone(),
        beta,
        emit_patterns,
        v: constants.v(),
        a: constants.a(),
        b: constants.b(),
    };

    let gumbel = gumbel_experiment(&cfg, &constants, replicates, &policy)?;
    let poisson = poisson_experiment(&cfg, &constants, delta, replicates, &policy, &split)?;
    // Laplace patterns restricted just below the test-function support; the
    // full `floor` is used only for the exported per-replicate patterns.
    let laplace_floor = delta - 1.0;
    let patterns = par_map_fields(&cfg, &policy, replicates, |_, field| {
        extract_point_pattern(field, &constants, laplace_floor).expect("constants match cfg")
    })?;
    let laplace = laplace_experiment(&patterns, &IndicatorBox::full(d, 1.0, delta))?;
    let (boundary, boundary_skipped_reason) =
        match boundary_exceedance_rate(&cfg, &constants, delta, replicates, &policy, beta) {
            Ok(report) => (Some(report), None),
            Err(Error::EmptyBulkRegion { n }) => (
                None,
                Some(format!("bulk region is empty at n = {n}, beta = {beta}")),
            ),
            Err(other) => return Err(other),
        };

    let out = OutputDir::create(
        &args
            .out
            .or(file.out)
            .unwrap_or_else(|| PathBuf::from("zagff-extremes")),
        args.force,
    )?;
    out.write_json("config.json", &config)?;

    // per-replicate maxima (raw and rescaled)
    out.write_with("maxima.csv", |buf| {
        writeln!(buf, "replicate,raw_max,rescaled_max")?;
        for (i, &z) in gumbel.rescaled_maxima.iter().enumerate() {
            writeln!(
                buf,
                "{i},{},{}",
                zagff::fmt_f64(constants.threshold(z)),
                zagff::fmt_f64(z)
            )?;
        }
        Ok(())
    })?;

    // per-replicate exceedance counts, total and per split cell
    out.write_with("counts.csv", |buf| {
        let cells = poisson.cell_counts[0].len();
        let header: Vec<String> = ["replicate".to_string(), "total".to_string()]
            .into_iter()
            .chain((0..cells).map(|c| format!("cell_{c}")))
            .collect();
        writeln!(buf, "{}", header.join(","))?;
        for (i, (total, cells)) in poisson.totals.iter().zip(&poisson.cell_counts).enumerate() {
            let mut row = vec![i.to_string(), total.to_string()];
            row.extend(cells.iter().map(|c| c.to_string()));
            writeln!(buf, "{}", row.join(","))?;
        }
        Ok(())
    })?;

    // one long-format summary row per scalar statistic
    out.write_with("summary.csv", |buf| {
        writeln!(buf, "experiment,statistic,value")?;
        let mut row = |exp: &str, stat: &str, v: f64| -> Result<()> {
            writeln!(buf, "{exp},{stat},{}", zagff::fmt_f64(v))?;
            Ok(())
        };
        row("gumbel", "ks_distance", gumbel.report.ks_distance)?;
        row("gumbel", "replicates", gumbel.report.replicates as f64)?;
        row("poisson", "empirical_mean", poisson.report.empirical_mean)?;
        row("poisson", "std_error", poisson.report.std_error)?;
        row(
            "poisson",
            "prediction_exact_marginal",
            poisson.report.prediction_exact_marginal,
        )?;
        row("poisson", "limit_mean", poisson.report.limit_mean)?;
        row("poisson", "dispersion", poisson.report.dispersion)?;
        row(
            "poisson",
            "max_cell_correlation",
            poisson.report.max_cell_correlation,
        )?;
        row("laplace", "empirical", laplace.empirical)?;
        row("laplace", "std_error", laplace.std_error)?;
        row("laplace", "theoretical", laplace.theoretical)?;
        if let Some(b) = &boundary {
            row("boundary", "rate", b.rate)?;
            row("boundary", "std_error", b.std_error)?;
            row("boundary", "union_bound", b.union_bound)?;
        }
        Ok(())
    })?;

    // exported patterns at the configured floor
    for i in 0..emit_patterns {
        let field = zagff::sampler::sample_field(&cfg, policy.stream_seed(i))?;
        let pattern = extract_point_pattern(&field, &constants, floor)?;
        out.write_with(&format!("pattern_rep{i}.csv"), |buf| {
            pattern.export_csv(buf)
        })?;
    }

    out.write_json(
        "report.json",
        &ExtremesReport {
            schema_version: SCHEMA_VERSION,
            command: "extremes",
            gumbel: gumbel.report,
            poisson: poisson.report,
            laplace,
            boundary,
            boundary_skipped_reason,
        },
    )?;
    Ok(true)
}
