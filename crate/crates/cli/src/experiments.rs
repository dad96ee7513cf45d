//! Single-pipeline runs: `gbs-prob`, `amplitude`, `reconstruct`, `hadamard`.

use anyhow::{Context as _, Result};
use gpnl_core::gaussian::{haar_unitary, haar_unitary_with, squeezing_tail_mass};
use gpnl_core::gbs::{fock_probability, gbs_probability};
use gpnl_core::hadamard::{random_instance, run_hadamard, DEFAULT_CONDITIONING_MARGIN};
use gpnl_core::reduction::{amplitude, run_theorem1, JmaxPolicy};
use gpnl_core::{AmplitudeSeries, GbsInstance, Gpnl1Instance, HadamardInstance, Matrix, OccupationVector};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::report::Check;
use crate::seeds::stream;

/// What a pipeline hands back to the runner.
pub struct Outcome {
    pub checks: Vec<Check>,
    pub result: Value,
    /// Series with its evaluation times, for CSV output.
    pub series: Option<(AmplitudeSeries, Vec<f64>)>,
}

/// `|A_t|` may exceed 1 only by rounding.
const MODULUS_SLACK: f64 = 1e-12;

fn interferometer(cfg: &ExperimentConfig, seed: u64) -> Matrix {
    match cfg.instance.seed {
        Some(s) => haar_unitary(cfg.instance.m, s),
        None => haar_unitary_with(cfg.instance.m, &mut stream(seed, "interferometer")),
    }
}

fn gbs_instance(cfg: &ExperimentConfig, seed: u64) -> Result<GbsInstance> {
    let p = &cfg.instance;
    Ok(GbsInstance::new(interferometer(cfg, seed), p.r, p.k)?)
}

fn squeezings(cfg: &ExperimentConfig) -> Vec<f64> {
    vec![cfg.instance.r; cfg.instance.k]
}

/// Collision-free outcomes with at most `n` photons, by increasing bit mask.
pub fn collision_free_outcomes(m: usize, n: usize) -> Vec<OccupationVector> {
    (0u64..1 << m)
        .filter(|mask| mask.count_ones() as usize <= n)
        .map(|mask| OccupationVector::new((0..m).map(|i| (mask >> i & 1) as u32).collect()))
        .collect()
}

pub fn gbs_prob(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome> {
    let inst = gbs_instance(cfg, seed)?;
    let sq = squeezings(cfg);
    let cutoff = cfg.cutoff.resolve(&sq);
    let outcomes = match &cfg.outcome {
        Some(s) => vec![OccupationVector::new(s.clone())],
        None => collision_free_outcomes(cfg.instance.m, cfg.instance.n),
    };
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for s in outcomes {
        let ph = gbs_probability(&inst, &s).with_context(|| format!("outcome {s}"))?;
        let pf = fock_probability(&inst, &s)?;
        worst = worst.max((ph - pf).abs());
        rows.push(json!({"outcome": s, "p_hafnian": ph, "p_fock": pf, "abs_diff": (ph - pf).abs()}));
    }
    let check = Check::at_most("oracle", worst, cfg.tolerances.oracle, json!({"outcomes": rows.len()}));
    Ok(Outcome {
        checks: vec![check],
        result: json!({
            "m": inst.m, "k": inst.k, "r": inst.r, "cutoff": cutoff,
            "tail_mass": squeezing_tail_mass(&sq, cutoff), "outcomes": rows,
        }),
        series: None,
    })
}

fn gpnl1(cfg: &ExperimentConfig, seed: u64) -> Result<Gpnl1Instance> {
    let cutoff = cfg.cutoff.resolve(&squeezings(cfg));
    Ok(Gpnl1Instance::lemma1(gbs_instance(cfg, seed)?, cfg.instance.n, cutoff, false)?)
}

pub fn amplitudes(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome> {
    let inst = gpnl1(cfg, seed)?;
    let times = cfg.instance.t.clone();
    let values = times.iter().map(|&t| amplitude(&inst, t)).collect::<gpnl_core::Result<Vec<_>>>()?;
    let excess = values.iter().map(|a| a.value.norm() - 1.0).fold(0.0f64, f64::max);
    let rows: Vec<Value> = times
        .iter()
        .zip(&values)
        .map(|(t, a)| json!({"t": t, "re": a.value.re, "im": a.value.im, "error_bound": a.error_bound}))
        .collect();
    let series = AmplitudeSeries {
        j_max: times.len(),
        values: values.iter().map(|a| a.value).collect(),
        errors: values.iter().map(|a| a.error_bound).collect(),
    };
    Ok(Outcome {
        checks: vec![Check::at_most("modulus_excess", excess, MODULUS_SLACK, Value::Null)],
        result: json!({
            "target": inst.s_star, "j_star": inst.j_star, "cutoff": inst.cutoff,
            "tail_mass": inst.tail_mass()?, "hamiltonian": inst.h, "amplitudes": rows,
        }),
        series: Some((series, times)),
    })
}

pub fn reconstruct(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome> {
    let inst = gpnl1(cfg, seed)?;
    let policy = cfg.jmax.unwrap_or(JmaxPolicy::Auto);
    let (rep, series) = run_theorem1(&inst, cfg.instance.c, policy, cfg.tolerances.reconstruction)?;
    let allowed = rep.aliasing_mass + rep.amplitude_error_budget + cfg.tolerances.reconstruction;
    let mut check = Check::at_most("theorem1", rep.abs_err, allowed, json!({"j_max": rep.j_max}));
    check.pass &= rep.pass;
    let times = (0..series.j_max).map(|k| series.grid_time(k)).collect();
    Ok(Outcome {
        checks: vec![check],
        result: json!({"target": inst.s_star, "cutoff": inst.cutoff, "report": rep}),
        series: Some((series, times)),
    })
}

pub fn hadamard(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome> {
    let p = &cfg.instance;
    let inst = match &cfg.hadamard {
        Some(h) => HadamardInstance::new(h.psi_g.clone(), h.psi_g_prime.clone(), h.v.clone(), p.alpha(), h.system_cutoff)?,
        None => random_instance(&mut stream(seed, "hadamard"), p.m, p.alpha(), p.r, p.d_max)?,
    };
    let rep = run_hadamard(&inst, DEFAULT_CONDITIONING_MARGIN)?;
    let tol = &cfg.tolerances;
    let checks = vec![
        Check::at_most("amplitude", rep.abs_err, tol.hadamard, Value::Null),
        Check::at_most("lambda_state", rep.lambda_err, tol.lambda, Value::Null),
        Check::at_most("closed_form", rep.closed_form_err[0].max(rep.closed_form_err[1]), tol.expansion, Value::Null),
    ];
    Ok(Outcome {
        checks,
        result: json!({
            "p_real": rep.p_real, "p_imag": rep.p_imag,
            "recovered_re": rep.recovered_re, "recovered_im": rep.recovered_im,
            "direct_re": rep.direct_re, "direct_im": rep.direct_im,
            "abs_err": rep.abs_err, "conditioning": rep.conditioning,
            "system_cutoff": inst.system_cutoff, "ancilla_cutoff": inst.ancilla_cutoff,
            "report": rep,
        }),
        series: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outcome_enumeration() {
        let all = collision_free_outcomes(3, 2);
        assert_eq!(all.len(), 7);
        assert_eq!(all[0].as_slice(), &[0, 0, 0]);
        assert!(all.iter().all(|s| s.collision_free() && s.total_photons() <= 2));
    }
}
