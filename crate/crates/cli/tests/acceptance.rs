//! Runs `gpnl verify-all` under two thread counts and prints one PASS/FAIL line per criterion.

use std::process::Command;

use serde_json::Value;

// (check name, pinned tolerance on the reported value)
const CRITERIA: [(&str, f64); 9] = [
    ("1-oracle-equivalence", 1e-8),
    ("2-pair-distribution", 1e-12),
    ("3-nondegeneracy", 0.0),
    ("4-theorem1-reconstruction", 1e-9),
    ("5-chernoff-bound", 0.0),
    ("6-error-propagation", 0.0),
    ("7-hadamard-round-trip", 1e-6),
    ("8-theorem2-chain", 1e-6),
    ("9-thread-determinism", 0.0),
];

const SEED: &str = "20240607";

fn verify_all(threads: &str) -> (i32, Vec<u8>) {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gpnl"))
        .args(["verify-all", "--seed", SEED, "--threads", threads, "--out"])
        .arg(dir.path())
        .env_remove("GPNL_CONFIG")
        .env_remove("GPNL_TOLERANCE_SCALE")
        .output()
        .expect("spawn gpnl");
    let code = out.status.code().unwrap_or(-1);
    let bytes = std::fs::read(dir.path().join("results.json")).unwrap_or_default();
    (code, bytes)
}

#[test]
fn acceptance_criteria() {
    let (code1, single) = verify_all("1");
    let (code4, multi) = verify_all("4");
    let results: Value = serde_json::from_slice(&single).expect("results.json");
    let identical = !single.is_empty() && single == multi;

    let mut failed = Vec::new();
    for (name, tol) in CRITERIA {
        let check = results["checks"].as_array().and_then(|cs| cs.iter().find(|c| c["name"] == name));
        let (value, reported) = match check {
            Some(c) => (c["value"].as_f64().unwrap_or(f64::NAN), c["pass"].as_bool().unwrap_or(false)),
            None => (f64::NAN, false),
        };
        let mut pass = reported && value <= tol;
        if name == "9-thread-determinism" {
            pass &= identical;
        }
        println!("{} {name}: value {value:.3e}, tolerance {tol:.1e}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            failed.push(name);
        }
    }
    assert_eq!((code1, code4), (0, 0), "verify-all exit codes");
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
