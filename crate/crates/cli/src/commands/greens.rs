//! `zagff greens`: Green table CSVs, the convergence report, and decay
//! profiles.

use crate::output::OutputDir;
use crate::{parse_usize_list, SCHEMA_VERSION};
use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use zagff::greens::{convergence_report, decay_profile_torus, zero_average_green, DecayProfile};
use zagff::{Error, FieldConfig, Result};

#[derive(Args)]
pub struct GreensArgs {
    /// Lattice dimension (>= 3).
    #[arg(long)]
    d: Option<usize>,
    /// Single torus side length.
    #[arg(long, conflicts_with = "n_list")]
    n: Option<usize>,
    /// Comma-separated side lengths for the convergence study.
    #[arg(long)]
    n_list: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overwrite a non-empty output directory.
    #[arg(long, default_value_t = false)]
    force: bool,
    /// Optional JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct GreensFileConfig {
    d: Option<usize>,
    n: Option<usize>,
    n_list: Option<Vec<usize>>,
    out: Option<PathBuf>,
}

/// Resolved parameters, echoed to `config.json`.
#[derive(Debug, Serialize)]
struct GreensConfig {
    command: &'static str,
    d: usize,
    n_list: Vec<usize>,
}

#[derive(Serialize)]
struct GreensReport {
    schema_version: &'static str,
    command: &'static str,
    v: f64,
    rows: Vec<zagff::greens::ConvergenceRow>,
    gap_strictly_decreasing: bool,
    decay: Vec<DecayProfile>,
}

pub fn run(args: GreensArgs) -> Result<bool> {
    let file: GreensFileConfig = super::load_config_file(args.config.as_deref())?;
    let d = args.d.or(file.d).unwrap_or(3);
    let n_list: Vec<usize> = match (args.n, args.n_list) {
        (Some(n), _) => vec![n],
        (None, Some(raw)) => parse_usize_list(&raw, "n-list")?,
        (None, None) => match (file.n, file.n_list) {
            (Some(n), _) => vec![n],
            (None, Some(list)) => list,
            (None, None) => {
                return Err(Error::InvalidParameter {
                    name: "n",
                    reason: "pass --n or --n-list (or set them in the config file)".into(),
                })
            }
        },
    };
    // validate before touching the filesystem
    for &n in &n_list {
        FieldConfig::new(d, n)?;
    }
    let out_path = args
        .out
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from("zagff-greens"));

    let config = GreensConfig {
        command: "greens",
        d,
        n_list: n_list.clone(),
    };
    let report = convergence_report(&n_list, d)?;
    let mut decay = Vec::new();
    let out = OutputDir::create(&out_path, args.force)?;
    out.write_json("config.json", &config)?;
    for &n in &n_list {
        let cfg = FieldConfig::new(d, n)?;
        let table = zero_average_green(&cfg)?;
        out.write_with(&format!("green_table_n{n}.csv"), |buf| {
            table.export_csv(buf)
        })?;
        let profile = decay_profile_torus(&table);
        out.write_with(&format!("decay_profile_n{n}.csv"), |buf| {
            use std::io::Write;
            writeln!(buf, "distance,max_abs_g")?;
            for (r, g) in &profile.rows {
                writeln!(buf, "{r},{}", zagff::fmt_f64(*g))?;
            }
            Ok(())
        })?;
        decay.push(profile);
    }
    out.write_with("convergence.csv", |buf| report.export_csv(buf))?;
    out.write_json(
        "report.json",
        &GreensReport {
            schema_version: SCHEMA_VERSION,
            command: "greens",
            v: report.rows[0].v,
            gap_strictly_decreasing: report.gaps_strictly_decreasing(),
            rows: report.rows,
            decay,
        },
    )?;
    Ok(true)
}
