//! Amplitude of a single-Kerr-layer process recovered through the Hadamard
//! test, with the GBS output state on both sides.

use serde::{Deserialize, Serialize};

use super::{
    closed_form_probabilities, hadamard_run, recover_amplitude, HadamardCoefficients, HadamardInstance,
    NumberConservingOp, HADAMARD_TAIL_THRESHOLD,
};
use crate::error::Result;
use crate::gaussian::cutoff_for_squeezings;
use crate::numeric::C64;
use crate::reduction::{amplitude, Gpnl1Instance};

/// Outcome of the chain for one time `t`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Theorem2Report {
    pub t: f64,
    pub alpha: C64,
    pub k: usize,
    pub r: f64,
    pub system_cutoff: usize,
    pub p_real: f64,
    pub p_imag: f64,
    /// `⟨Ψ_out|0⟩` from the simulation and `cosh(r)^{-K/2}`.
    pub overlap0: C64,
    pub overlap0_expected: f64,
    /// `|p_real - (c₁ cosh^{-K} + c₂|A_t|² + c₃ cosh^{-K/2} Re A_t)|`.
    pub expansion_err: f64,
    pub recovered: C64,
    pub direct: C64,
    pub direct_error_bound: f64,
    pub abs_err: f64,
    pub epsilon: f64,
    /// Largest shift of `Re A_t` / `Im A_t` over all `±ε` perturbations of
    /// `p_real`, `p_imag` and `|A_t|²`.
    pub noise_shift: [f64; 2],
    /// `(1 + |c₂|)/|c₃| · e^{Kr} · ε` for the two projections.
    pub noise_bound: [f64; 2],
    pub leakage: f64,
}

impl Theorem2Report {
    pub fn noise_within_bound(&self) -> bool {
        self.noise_shift[0] <= self.noise_bound[0] && self.noise_shift[1] <= self.noise_bound[1]
    }
}

/// Run the Hadamard test with `Ψ_G = Ψ'_G = U|Ψ_in⟩` and `V = e^{-itH}`.
/// The measured amplitude is then `conj(A_t)`; the report states `A_t`.
pub fn run_theorem2(inst: &Gpnl1Instance, t: f64, alpha: C64, epsilon: f64, margin: f64) -> Result<Theorem2Report> {
    let spec = inst.gbs.gaussian_spec()?;
    let cutoff = inst.cutoff.max(cutoff_for_squeezings(&spec.squeezings, HADAMARD_TAIL_THRESHOLD));
    let v = NumberConservingOp::Kerr { h: inst.h.clone(), t, sign: -1.0 };
    let had = HadamardInstance::new(spec.clone(), spec, v, alpha, Some(cutoff))?;
    let run = hadamard_run(&had)?;
    let p = run.probabilities;
    let rec = recover_amplitude(p.p_real, p.p_imag, run.overlap0, run.vsq, alpha, margin)?;
    let recovered = rec.amplitude.conj();

    let direct = amplitude(inst, t)?;
    let (k, r) = (inst.gbs.k, inst.gbs.r);
    let overlap0_expected = r.cosh().powf(-(k as f64) / 2.0);
    let expansion = closed_form_probabilities(C64::new(overlap0_expected, 0.0), direct.value.conj(), alpha);

    let shifts = noise_shifts(p.p_real, p.p_imag, run.overlap0, run.vsq, alpha, margin, epsilon, rec.amplitude)?;
    let growth = (k as f64 * r).exp() * epsilon;
    let bound = |c: HadamardCoefficients| (1.0 + c.c2.abs()) / c.c3.abs() * growth;

    Ok(Theorem2Report {
        t,
        alpha,
        k,
        r,
        system_cutoff: cutoff,
        p_real: p.p_real,
        p_imag: p.p_imag,
        overlap0: run.overlap0,
        overlap0_expected,
        expansion_err: (p.p_real - expansion.p_real).abs(),
        recovered,
        direct: direct.value,
        direct_error_bound: direct.error_bound,
        abs_err: (recovered - direct.value).norm(),
        epsilon,
        noise_shift: shifts,
        noise_bound: [bound(HadamardCoefficients::real(alpha)), bound(HadamardCoefficients::imag(alpha))],
        leakage: run.leakage,
    })
}

#[allow(clippy::too_many_arguments)]
fn noise_shifts(
    p_real: f64,
    p_imag: f64,
    overlap0: C64,
    vsq: f64,
    alpha: C64,
    margin: f64,
    epsilon: f64,
    clean: C64,
) -> Result<[f64; 2]> {
    let mut worst = [0.0f64; 2];
    for signs in 0..8u32 {
        let s = |bit: u32| if signs >> bit & 1 == 1 { epsilon } else { -epsilon };
        let noisy = recover_amplitude(p_real + s(0), p_imag + s(1), overlap0, vsq + s(2), alpha, margin)?;
        worst[0] = worst[0].max((noisy.amplitude.re - clean.re).abs());
        worst[1] = worst[1].max((noisy.amplitude.im - clean.im).abs());
    }
    Ok(worst)
}
