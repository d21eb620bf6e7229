//! The `zagff` batch experiment runner.
//!
//! ```text
//! zagff <greens|verify|extremes|sample> [flags]
//! ```
//!
//! Every command is a pure function of its resolved config and master seed:
//! it writes one output directory containing `config.json` (the resolved
//! parameters), `report.json` (schema-versioned summary), and the CSVs it
//! declares. `ZAGFF_THREADS` caps the worker pool; outputs are byte-identical
//! for any worker count. Exit codes: 0 success, 1 acceptance/computation
//! failure, 2 usage error. Failures emit a machine-readable error JSON on
//! stderr.

mod commands;
mod output;

use clap::{Parser, Subcommand};
use zagff::Error;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Parser)]
#[command(
    name = "zagff",
    version,
    about = "Zero-average Gaussian free field experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Green's function tables, convergence study, and decay profiles.
    Greens(commands::greens::GreensArgs),
    /// Identity and oracle verification battery; exit 0 iff all checks pass.
    Verify(commands::verify::VerifyArgs),
    /// Extreme-value experiments: Gumbel fit, Poisson counts, Laplace
    /// functional, boundary exceedances.
    Extremes(commands::extremes::ExtremesArgs),
    /// Sample fields and export them.
    Sample(commands::sample::SampleArgs),
}

fn main() {
    init_thread_pool();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Greens(args) => commands::greens::run(args),
        Command::Verify(args) => commands::verify::run(args),
        Command::Extremes(args) => commands::extremes::run(args),
        Command::Sample(args) => commands::sample::run(args),
    };
    match outcome {
        Ok(all_pass) => {
            if !all_pass {
                std::process::exit(1);
            }
        }
        Err(err) => {
            let payload = serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "error": { "kind": err.kind(), "message": err.to_string() },
            });
            eprintln!("{payload}");
            std::process::exit(if err.is_usage() { 2 } else { 1 });
        }
    }
}

fn init_thread_pool() {
    if let Ok(raw) = std::env::var("ZAGFF_THREADS") {
        if let Ok(threads) = raw.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

/// Parses a comma-separated list of positive integers.
pub fn parse_usize_list(raw: &str, name: &'static str) -> Result<Vec<usize>, Error> {
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|e| Error::InvalidParameter {
                    name,
                    reason: format!("bad entry {tok:?}: {e}"),
                })
        })
        .collect()
}
