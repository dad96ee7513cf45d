//! Result documents. `results.json` holds everything that depends only on the
//! configuration and seed; wall-clock data goes to `metadata.json`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use gpnl_core::AmplitudeSeries;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: u32 = 1;

/// One pass/fail comparison of `value` against `tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
    pub details: Value,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64, details: Value) -> Self {
        Self { name: name.into(), pass: value <= tolerance, value, tolerance, details }
    }

    /// A boolean outcome; `value` counts violations.
    pub fn flag(name: &str, violations: usize, details: Value) -> Self {
        Self { name: name.into(), pass: violations == 0, value: violations as f64, tolerance: 0.0, details }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub check: String,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Results {
    pub schema: u32,
    pub kind: &'static str,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub failures: Vec<Failure>,
    pub result: Value,
}

impl Results {
    pub fn new(kind: &'static str, seed: u64, checks: Vec<Check>, result: Value) -> Self {
        let failures: Vec<Failure> = checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| Failure { check: c.name.clone(), value: c.value, tolerance: c.tolerance })
            .collect();
        Self { schema: SCHEMA, kind, seed, pass: failures.is_empty(), checks, failures, result }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub schema: u32,
    pub kind: &'static str,
    pub version: &'static str,
    /// Seconds since the Unix epoch at completion.
    pub timestamp: u64,
    pub threads: usize,
    pub elapsed_ms: u128,
    pub timings_ms: BTreeMap<String, u128>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Rows `k, t_k, Re A, Im A`.
pub fn write_series_csv(path: &Path, series: &AmplitudeSeries, times: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(["k", "t_k", "re", "im"])?;
    for (k, (z, t)) in series.values.iter().zip(times).enumerate() {
        w.serialize((k, t, z.re, z.im))?;
    }
    w.flush()?;
    Ok(())
}

pub fn output_paths(dir: &Path) -> (PathBuf, PathBuf) {
    (dir.join("results.json"), dir.join("metadata.json"))
}
