//! `verify-all`: every acceptance criterion at desk-scale parameters.
//! Parameters below are fixed; only the master seed and the tolerance scale
//! vary between runs.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use anyhow::Result;
use gpnl_core::fock::enumerate_basis;
use gpnl_core::gaussian::{cutoff_for_squeezings, haar_unitary_with, squeezed_input, squeezing_tail_mass};
use gpnl_core::gbs::{chernoff_bound, chernoff_cutoffs, exact_photon_tail, fock_probability, gbs_probability, pair_distribution};
use gpnl_core::hadamard::{random_instance, run_hadamard, run_theorem2, DEFAULT_ALPHA, DEFAULT_CONDITIONING_MARGIN};
use gpnl_core::kerr::{lemma1_hamiltonian, lemma1_target, verify_nondegeneracy};
use gpnl_core::reduction::{amplitude_series, reconstruct, run_theorem1, JmaxPolicy};
use gpnl_core::{DiagonalHamiltonian, GbsInstance, Gpnl1Instance, OccupationVector, C64};
use rand::seq::index::sample;
use rand::Rng;
use serde_json::json;

use crate::config::Tolerances;
use crate::report::Check;
use crate::seeds::stream;

/// Tail mass accepted for the squeezed inputs of the oracle comparison.
const ORACLE_TAIL: f64 = 1e-10;
/// Squeezing tail used to size the cutoff of reconstruction instances.
const RECONSTRUCTION_TAIL: f64 = 1e-12;
/// Relative rounding allowance when comparing a quantity against a bound.
const ROUNDING: f64 = 1e-9;

pub struct Verification {
    pub checks: Vec<Check>,
    pub timings_ms: BTreeMap<String, u128>,
}

pub fn verify_all(seed: u64, tol: &Tolerances) -> Result<Verification> {
    type Step<'a> = (&'a str, Box<dyn Fn() -> Result<Check> + 'a>);
    let steps: Vec<Step> = vec![
        ("1-oracle-equivalence", Box::new(|| oracle_equivalence(seed, tol))),
        ("2-pair-distribution", Box::new(|| pair_histogram(tol))),
        ("3-nondegeneracy", Box::new(nondegeneracy)),
        ("4-theorem1-reconstruction", Box::new(|| theorem1(seed, tol))),
        ("5-chernoff-bound", Box::new(chernoff)),
        ("6-error-propagation", Box::new(|| error_propagation(seed))),
        ("7-hadamard-round-trip", Box::new(|| hadamard_round_trip(seed, tol))),
        ("8-theorem2-chain", Box::new(|| theorem2(seed, tol))),
        ("9-thread-determinism", Box::new(|| determinism(seed))),
    ];
    let mut checks = Vec::new();
    let mut timings_ms = BTreeMap::new();
    for (name, step) in steps {
        let start = Instant::now();
        let mut check = step()?;
        check.name = name.to_string();
        timings_ms.insert(name.to_string(), start.elapsed().as_millis());
        checks.push(check);
    }
    Ok(Verification { checks, timings_ms })
}

fn oracle_equivalence(seed: u64, tol: &Tolerances) -> Result<Check> {
    let mut rng = stream(seed, "verify/oracle");
    let (mut worst, mut worst_tail) = (0.0f64, 0.0f64);
    let mut max_cutoff = 0;
    for _ in 0..100 {
        let m = rng.random_range(2..=6usize);
        let k = rng.random_range(1..=m.min(3));
        let r = rng.random_range(0.1..0.6);
        // odd photon numbers vanish identically on both paths
        let n = if m >= 4 && rng.random_bool(0.5) { 4 } else { 2 };
        let u = haar_unitary_with(m, &mut rng);
        let mut occ = vec![0u32; m];
        for i in sample(&mut rng, m, n) {
            occ[i] = 1;
        }
        let s = OccupationVector::new(occ);
        let inst = GbsInstance::new(u, r, k)?;
        worst = worst.max((gbs_probability(&inst, &s)? - fock_probability(&inst, &s)?).abs());
        let cutoff = cutoff_for_squeezings(&vec![r; k], ORACLE_TAIL);
        max_cutoff = max_cutoff.max(cutoff);
        worst_tail = worst_tail.max(squeezing_tail_mass(&vec![r; k], cutoff));
    }
    let mut check = Check::at_most(
        "",
        worst,
        tol.oracle,
        json!({"instances": 100, "max_tail_mass": worst_tail, "max_cutoff": max_cutoff}),
    );
    check.pass &= worst_tail < ORACLE_TAIL;
    Ok(check)
}

fn pair_histogram(tol: &Tolerances) -> Result<Check> {
    let mut worst = 0.0f64;
    for k in 1..=3 {
        let basis = enumerate_basis(k, 21)?;
        for r in [0.2, 0.5, 1.0] {
            let sectors = squeezed_input(k, r, &basis)?.sector_norms_sqr();
            for n in 0..=10 {
                worst = worst.max((sectors[2 * n] - pair_distribution(k, r, n)).abs());
                worst = worst.max(sectors[2 * n + 1]);
            }
        }
    }
    Ok(Check::at_most("", worst, tol.distribution, json!({"k": [1, 2, 3], "r": [0.2, 0.5, 1.0], "n_max": 10})))
}

fn nondegeneracy() -> Result<Check> {
    let mut violations = 0;
    let mut cases = 0;
    for n in 1..=4 {
        for m in n..=6 {
            let h = lemma1_hamiltonian(n, m)?;
            let (target, _) = lemma1_target(n, m);
            let rep = verify_nondegeneracy(&h, &target, n + 3)?;
            cases += 1;
            violations += usize::from(!rep.is_unique());
        }
    }
    // a linear Hamiltonian must expose the degeneracy of |1,1> with |2,0>, |0,2>
    let linear = DiagonalHamiltonian::linear(vec![1.0, 1.0])?;
    let control = verify_nondegeneracy(&linear, &OccupationVector::new(vec![1, 1]), 4)?;
    let control_ok = control.collisions.len() == 2;
    violations += usize::from(!control_ok);
    Ok(Check::flag("", violations, json!({"cases": cases, "negative_control_collisions": control.collisions})))
}

fn reconstruction_instance(seed: u64, name: &str) -> Result<Gpnl1Instance> {
    let (m, k, r, n) = (4, 3, 0.4, 2);
    let u = haar_unitary_with(m, &mut stream(seed, name));
    let cutoff = cutoff_for_squeezings(&vec![r; k], RECONSTRUCTION_TAIL);
    Ok(Gpnl1Instance::lemma1(GbsInstance::new(u, r, k)?, n, cutoff, true)?)
}

fn theorem1(seed: u64, tol: &Tolerances) -> Result<Check> {
    let (mut excess, mut fallback_err) = (f64::NEG_INFINITY, 0.0f64);
    let mut j_max = Vec::new();
    let mut pass = true;
    for i in 0..10 {
        let inst = reconstruction_instance(seed, &format!("verify/theorem1/{i}"))?;
        let (rep, _) = run_theorem1(&inst, 1.0, JmaxPolicy::Formula, tol.reconstruction)?;
        excess = excess.max(rep.abs_err - rep.aliasing_mass);
        pass &= rep.abs_err <= rep.aliasing_mass + tol.reconstruction && rep.j_max == 256;
        j_max.push(rep.j_max);
        let (fb, _) = run_theorem1(&inst, 1.0, JmaxPolicy::Fallback, tol.fallback)?;
        fallback_err = fallback_err.max(fb.abs_err);
        pass &= fb.abs_err <= tol.fallback;
    }
    let mut check = Check::at_most(
        "",
        excess.max(0.0),
        tol.reconstruction,
        json!({"seeds": 10, "j_max": j_max, "fallback_max_abs_err": fallback_err, "fallback_tolerance": tol.fallback}),
    );
    check.pass = pass;
    Ok(check)
}

fn chernoff() -> Result<Check> {
    let mut violations = 0;
    let mut points = 0;
    let mut tightest = 0.0f64;
    for k in 1..=6 {
        for ri in 1..=15 {
            let r = 0.1 * ri as f64;
            let mut stars: Vec<f64> = (0..=160).map(|i| 0.5 * i as f64).collect();
            stars.extend((1..=8).map(|n| chernoff_cutoffs(k, r, n, 1.0).n_star));
            for n_star in stars {
                let exact = exact_photon_tail(k, r, n_star);
                let bound = chernoff_bound(k, r, n_star, 0.5);
                points += 1;
                violations += usize::from(exact > bound * (1.0 + 1e-12));
                tightest = tightest.max(exact / bound);
            }
        }
    }
    Ok(Check::flag("", violations, json!({"grid_points": points, "max_exact_over_bound": tightest})))
}

fn error_propagation(seed: u64) -> Result<Check> {
    let inst = reconstruction_instance(seed, "verify/propagation")?;
    let series = amplitude_series(&inst, 256)?;
    let clean = reconstruct(&series, inst.j_star)?.q;
    let mut rng = stream(seed, "verify/propagation/noise");
    let mut violations = 0;
    let mut worst_ratio = 0.0f64;
    for eps in [1e-4, 1e-6, 1e-8] {
        let aligned: Vec<C64> =
            (0..256).map(|k| C64::from_polar(eps, 2.0 * PI * (k as f64 * inst.j_star as f64 / 256.0))).collect();
        let patterns = [
            aligned.clone(),
            aligned.iter().map(|z| -z).collect(),
            (0..256).map(|_| C64::from_polar(eps, rng.random_range(0.0..2.0 * PI))).collect(),
            (0..256).map(|_| C64::new(if rng.random_bool(0.5) { eps } else { -eps }, 0.0)).collect::<Vec<_>>(),
        ];
        for noise in patterns {
            let q = reconstruct(&series.perturbed(&noise)?, inst.j_star)?.q;
            let ratio = (q - clean).abs() / eps;
            worst_ratio = worst_ratio.max(ratio);
            violations += usize::from(ratio > 1.0 + ROUNDING);
        }
    }
    Ok(Check::flag("", violations, json!({"epsilons": [1e-4, 1e-6, 1e-8], "max_shift_over_epsilon": worst_ratio})))
}

fn hadamard_round_trip(seed: u64, tol: &Tolerances) -> Result<Check> {
    let mut rng = stream(seed, "verify/hadamard");
    let alpha = C64::new(DEFAULT_ALPHA, 0.0);
    let (mut amp, mut lambda, mut closed, mut norm_excess) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut calls = Vec::new();
    for i in 0..20 {
        let modes = 1 + i % 3;
        let d_max = if i % 4 == 3 { 0.0 } else { 0.25 };
        let inst = random_instance(&mut rng, modes, alpha, 0.3, d_max)?;
        let rep = run_hadamard(&inst, DEFAULT_CONDITIONING_MARGIN)?;
        amp = amp.max(rep.abs_err);
        lambda = lambda.max(rep.lambda_err);
        closed = closed.max(rep.closed_form_err[0]).max(rep.closed_form_err[1]);
        norm_excess = norm_excess.max(rep.lambda_norm_err - rep.leakage);
        calls.push(rep.controlled_phase_calls);
    }
    let mut check = Check::at_most(
        "",
        amp,
        tol.hadamard,
        json!({
            "instances": 20, "max_lambda_err": lambda, "max_closed_form_err": closed,
            "max_norm_excess_over_leakage": norm_excess, "controlled_phase_calls": calls,
        }),
    );
    check.pass &= lambda <= tol.lambda && closed <= tol.expansion && norm_excess <= 1e-10;
    Ok(check)
}

fn theorem2(seed: u64, tol: &Tolerances) -> Result<Check> {
    let (m, k, r) = (3, 2, 0.3);
    let alpha = C64::new(DEFAULT_ALPHA, 0.0);
    let (mut worst, mut expansion, mut noise_ratio) = (0.0f64, 0.0f64, 0.0f64);
    let mut pass = true;
    for i in 0..2 {
        let u = haar_unitary_with(m, &mut stream(seed, &format!("verify/theorem2/{i}")));
        let cutoff = cutoff_for_squeezings(&vec![r; k], RECONSTRUCTION_TAIL);
        let inst = Gpnl1Instance::lemma1(GbsInstance::new(u, r, k)?, 1, cutoff, false)?;
        for t in [0.0, 0.37, 1.3] {
            let rep = run_theorem2(&inst, t, alpha, 1e-6, DEFAULT_CONDITIONING_MARGIN)?;
            worst = worst.max(rep.abs_err);
            expansion = expansion.max(rep.expansion_err);
            noise_ratio = noise_ratio.max(rep.noise_shift[0] / rep.noise_bound[0]).max(rep.noise_shift[1] / rep.noise_bound[1]);
            pass &= rep.noise_within_bound();
        }
    }
    let mut check = Check::at_most(
        "",
        worst,
        tol.theorem2,
        json!({"m": m, "k": k, "r": r, "epsilon": 1e-6, "max_expansion_err": expansion, "max_noise_over_bound": noise_ratio}),
    );
    check.pass &= pass && expansion <= tol.expansion;
    Ok(check)
}

/// The amplitude series is bitwise identical on one thread and on the
/// ambient pool.
fn determinism(seed: u64) -> Result<Check> {
    let run = || -> Result<_> {
        let inst = reconstruction_instance(seed, "verify/determinism")?;
        Ok(amplitude_series(&inst, 64)?)
    };
    let ambient = run()?;
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build()?.install(run)?;
    let differing = ambient
        .values
        .iter()
        .zip(&single.values)
        .filter(|(a, b)| a.re.to_bits() != b.re.to_bits() || a.im.to_bits() != b.im.to_bits())
        .count();
    Ok(Check::flag("", differing, json!({"points": 64})))
}
