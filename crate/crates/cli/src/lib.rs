//! Batch runner for the verification pipelines.
//!
//! Every run writes `results.json` (a pure function of configuration and
//! seed) and `metadata.json` (timestamp, thread count, timings) into the
//! output directory. Exit codes: 0 all checks pass, 1 a tolerance check
//! failed, 2 invalid configuration or arguments, 3 a pipeline error.

pub mod config;
pub mod experiments;
pub mod report;
pub mod seeds;
pub mod verify;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};

use config::{ExperimentConfig, Kind};
use report::{output_paths, write_json, write_series_csv, Metadata, Results};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Master seed used when neither the flag nor the configuration sets one.
pub const DEFAULT_SEED: u64 = 20240607;

#[derive(Debug, Parser)]
#[command(name = "gpnl", version, about = "Gaussian processes with Kerr layers: verification runner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment configuration (JSON).
    #[arg(long, global = true, env = "GPNL_CONFIG")]
    pub config: Option<PathBuf>,
    /// Master seed; overrides the configuration.
    #[arg(long, global = true, env = "GPNL_SEED")]
    pub seed: Option<u64>,
    /// Output directory; overrides the configuration.
    #[arg(long, global = true, env = "GPNL_OUT")]
    pub out: Option<PathBuf>,
    /// Multiplies every tolerance.
    #[arg(long, global = true, env = "GPNL_TOLERANCE_SCALE", default_value_t = 1.0)]
    pub tolerance_scale: f64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, env = "GPNL_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Hafnian and Fock-engine probabilities of collision-free outcomes.
    GbsProb,
    /// Amplitudes `<Ψ|e^{itH}|Ψ>` at the configured times.
    Amplitude,
    /// Reconstruct the target probability from an amplitude series.
    Reconstruct,
    /// Continuous-variable Hadamard test.
    Hadamard,
    /// All acceptance checks.
    VerifyAll,
}

impl Command {
    pub fn kind(self) -> Kind {
        match self {
            Command::GbsProb => Kind::GbsProb,
            Command::Amplitude => Kind::Amplitude,
            Command::Reconstruct => Kind::Reconstruct,
            Command::Hadamard => Kind::Hadamard,
            Command::VerifyAll => Kind::VerifyAll,
        }
    }
}

/// A fully resolved run.
pub struct Plan {
    pub kind: Kind,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

pub fn plan(cli: &Cli) -> Result<Plan> {
    let kind = cli.command.kind();
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(k) = config.kind {
        if k != kind {
            bail!("configuration is for `{}` but the subcommand is `{}`", k.name(), kind.name());
        }
    }
    if !(cli.tolerance_scale.is_finite() && cli.tolerance_scale > 0.0) {
        bail!("--tolerance-scale must be positive, got {}", cli.tolerance_scale);
    }
    if cli.threads == Some(0) {
        bail!("--threads must be positive");
    }
    config.tolerances = config.tolerances.scaled(cli.tolerance_scale);
    let seed = cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let out = cli.out.clone().or_else(|| config.output.dir.clone()).unwrap_or_else(|| PathBuf::from("gpnl-out"));
    Ok(Plan { kind, config, seed, out, threads: cli.threads })
}

/// Run a plan and write its outputs; returns the results document.
pub fn execute(plan: &Plan) -> Result<(Results, Metadata)> {
    let start = Instant::now();
    let mut timings_ms = BTreeMap::new();
    let cfg = &plan.config;
    let (checks, result, series) = match plan.kind {
        Kind::VerifyAll => {
            let v = verify::verify_all(plan.seed, &cfg.tolerances)?;
            timings_ms = v.timings_ms;
            let summary = serde_json::json!({
                "criteria": v.checks.iter().map(|c| serde_json::json!({"name": c.name, "pass": c.pass})).collect::<Vec<_>>(),
            });
            (v.checks, summary, None)
        }
        kind => {
            let o = match kind {
                Kind::GbsProb => experiments::gbs_prob(cfg, plan.seed)?,
                Kind::Amplitude => experiments::amplitudes(cfg, plan.seed)?,
                Kind::Reconstruct => experiments::reconstruct(cfg, plan.seed)?,
                _ => experiments::hadamard(cfg, plan.seed)?,
            };
            (o.checks, o.result, o.series)
        }
    };
    let results = Results::new(plan.kind.name(), plan.seed, checks, result);

    std::fs::create_dir_all(&plan.out)?;
    if let Some((s, times)) = series {
        let name = cfg.output.series_csv.clone().unwrap_or_else(|| PathBuf::from("amplitudes.csv"));
        write_series_csv(&plan.out.join(name), &s, &times)?;
    }
    let (res_path, meta_path) = output_paths(&plan.out);
    write_json(&res_path, &results)?;
    let metadata = Metadata {
        schema: report::SCHEMA,
        kind: plan.kind.name(),
        version: env!("CARGO_PKG_VERSION"),
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        threads: rayon::current_num_threads(),
        elapsed_ms: start.elapsed().as_millis(),
        timings_ms,
    };
    write_json(&meta_path, &metadata)?;
    Ok((results, metadata))
}

/// Parse-free entry point shared by the binary and the tests.
pub fn run(cli: &Cli) -> i32 {
    let plan = match plan(cli) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("configuration error: {e:#}");
            return EXIT_CONFIG;
        }
    };
    let body = || match execute(&plan) {
        Ok((results, _)) => {
            for c in &results.checks {
                eprintln!("{} {}: {:.3e} (tolerance {:.1e})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.tolerance);
            }
            if results.pass {
                EXIT_PASS
            } else {
                eprintln!("{} check(s) failed; see {}", results.failures.len(), plan.out.join("results.json").display());
                EXIT_TOLERANCE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_RUNTIME
        }
    };
    match plan.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(body),
            Err(e) => {
                eprintln!("error: cannot start {n} threads: {e}");
                EXIT_RUNTIME
            }
        },
        None => body(),
    }
}
