//! Continuous-variable Hadamard test: an ancilla coherent state and
//! controlled-phase gadgets turn two Gaussian-measurement probabilities into
//! the complex amplitude `⟨Ψ'_G|V|Ψ_G⟩` of a number-conserving unitary `V`.

mod register;
mod theorem2;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use register::AncillaRegister;
pub use theorem2::{run_theorem2, Theorem2Report};

use crate::error::{Error, Result};
use crate::fock::{apply_diagonal_phase, enumerate_basis, inner_product, FockBasis, GateOutput, StateVector};
use crate::gaussian::{
    apply_gaussian, apply_interferometer, apply_single_mode, coherent_coefficients, io::matrix_serde, GaussianSpec,
    SingleModeGate, UNITARITY_TOLERANCE,
};
use crate::kerr::{kerr_evolve, DiagonalHamiltonian};
use crate::numeric::{unitarity_deviation, Matrix, C64};

/// Default ancilla amplitude (`|α|² = 0.64`).
pub const DEFAULT_ALPHA: f64 = 0.8;
/// Smallest admissible `|sinh|`, `|sin|`, `|cos|` of `|α|²` and `|⟨Ψ'_G|0⟩|`.
pub const DEFAULT_CONDITIONING_MARGIN: f64 = 0.05;
/// Coherent-state tail accepted by [`cat_components`].
pub const CAT_TAIL_THRESHOLD: f64 = 1e-12;
/// Squeezing tail used to size the system cutoff of a Hadamard instance.
pub const HADAMARD_TAIL_THRESHOLD: f64 = 1e-18;

/// Ancilla levels needed for `|α⟩`: `|α|² + 10|α| + 10`, rounded up.
pub fn ancilla_cutoff(alpha: C64) -> usize {
    let x = alpha.norm_sqr();
    (x + 10.0 * x.sqrt() + 10.0).ceil() as usize
}

/// Even and odd parts `(|α⟩ ± |-α⟩)/2` of a coherent state.
#[derive(Debug, Clone)]
pub struct CatPair {
    pub plus: StateVector,
    pub minus: StateVector,
}

pub fn cat_components(alpha: C64, cutoff: usize) -> Result<CatPair> {
    let coeffs = coherent_coefficients(alpha, cutoff);
    let kept: f64 = coeffs.iter().rev().map(|c| c.norm_sqr()).sum();
    let tail = coherent_tail(alpha, cutoff).max(1.0 - kept);
    if tail >= CAT_TAIL_THRESHOLD {
        return Err(Error::CutoffTooSmall { cutoff, tail, threshold: CAT_TAIL_THRESHOLD });
    }
    let basis = enumerate_basis(1, cutoff)?;
    let zero = C64::new(0.0, 0.0);
    let plus = StateVector::from_fn(basis.clone(), |o| if o[0] % 2 == 0 { coeffs[o[0] as usize] } else { zero });
    let minus = StateVector::from_fn(basis, |o| if o[0] % 2 == 1 { coeffs[o[0] as usize] } else { zero });
    Ok(CatPair { plus, minus })
}

// Poisson tail Σ_{n > cutoff} e^{-x} x^n / n!, summed directly
fn coherent_tail(alpha: C64, cutoff: usize) -> f64 {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        return 0.0;
    }
    let mut term = (-x).exp();
    for n in 1..=cutoff + 1 {
        term *= x / n as f64;
    }
    let mut terms = Vec::new();
    let mut n = cutoff + 1;
    while term > 1e-300 && terms.len() < 10_000 {
        terms.push(term);
        n += 1;
        term *= x / n as f64;
    }
    terms.iter().rev().sum()
}

/// `U_CP(φ) = exp(-i φ n_0 Σ_{k≥1} n_k)` on an `(M+1)`-mode state, ancilla first.
pub fn controlled_phase(state: &StateVector, phi: f64) -> Result<StateVector> {
    if state.basis().modes() < 2 {
        return Err(Error::InvalidParameter("controlled phase needs an ancilla and at least one system mode".into()));
    }
    Ok(apply_diagonal_phase(state, |s| {
        let rest: u64 = s[1..].iter().map(|&x| x as u64).sum();
        -phi * s[0] as f64 * rest as f64
    }))
}

/// A unitary on the system modes that conserves total photon number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumberConservingOp {
    Identity,
    /// `exp(i · sign · t · H)`.
    Kerr { h: DiagonalHamiltonian, t: f64, sign: f64 },
    Interferometer {
        #[serde(with = "matrix_serde")]
        u: Matrix,
    },
}

impl NumberConservingOp {
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        match self {
            Self::Identity => Ok(state.clone()),
            Self::Kerr { h, t, sign } => kerr_evolve(state, h, sign * t),
            Self::Interferometer { u } => apply_interferometer(state, u),
        }
    }

    /// Check vacuum invariance and sector-wise norm conservation on `basis`.
    pub fn validate(&self, basis: &Arc<FockBasis>) -> Result<()> {
        match self {
            Self::Kerr { sign, .. } if sign.abs() != 1.0 => {
                return Err(Error::InvalidOperator(format!("Kerr sign must be ±1, got {sign}")));
            }
            Self::Interferometer { u } if !(unitarity_deviation(u) <= UNITARITY_TOLERANCE) => {
                return Err(Error::InvalidOperator("interferometer is not unitary".into()));
            }
            _ => {}
        }
        let vac = StateVector::vacuum(basis.clone());
        let moved = self.apply(&vac)?.distance(&vac)?;
        if moved > 1e-12 {
            return Err(Error::InvalidOperator(format!("vacuum moved by {moved:.3e}")));
        }
        let probe = StateVector::from_fn(basis.clone(), |s| {
            let w: f64 = s.iter().enumerate().map(|(i, &n)| (i + 1) as f64 * n as f64).sum();
            C64::new((1.0 + w).recip(), (0.5 * w).sin() * 0.1)
        });
        let before = probe.sector_norms_sqr();
        let after = self.apply(&probe)?.sector_norms_sqr();
        let worst = before.iter().zip(&after).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if worst > 1e-12 {
            return Err(Error::InvalidOperator(format!("photon-number sectors changed by {worst:.3e}")));
        }
        Ok(())
    }
}

/// Inputs of one Hadamard test.
#[derive(Debug, Clone)]
pub struct HadamardInstance {
    pub psi_g: GaussianSpec,
    pub psi_g_prime: GaussianSpec,
    pub v: NumberConservingOp,
    pub alpha: C64,
    pub system_cutoff: usize,
    pub ancilla_cutoff: usize,
}

impl HadamardInstance {
    /// Validate and size the instance; without an explicit cutoff the system
    /// cutoff covers both Gaussian states to [`HADAMARD_TAIL_THRESHOLD`].
    pub fn new(
        psi_g: GaussianSpec,
        psi_g_prime: GaussianSpec,
        v: NumberConservingOp,
        alpha: C64,
        system_cutoff: Option<usize>,
    ) -> Result<Self> {
        psi_g.validate()?;
        psi_g_prime.validate()?;
        if psi_g.mode_count != psi_g_prime.mode_count {
            return Err(Error::DimensionMismatch("Ψ_G and Ψ'_G have different mode counts".into()));
        }
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite ancilla amplitude".into()));
        }
        let system_cutoff = system_cutoff.unwrap_or_else(|| {
            psi_g.suggested_cutoff(HADAMARD_TAIL_THRESHOLD).max(psi_g_prime.suggested_cutoff(HADAMARD_TAIL_THRESHOLD))
        });
        let inst = Self { psi_g, psi_g_prime, v, alpha, system_cutoff, ancilla_cutoff: ancilla_cutoff(alpha) };
        inst.v.validate(&inst.system_basis()?)?;
        Ok(inst)
    }

    pub fn modes(&self) -> usize {
        self.psi_g.mode_count
    }

    pub fn system_basis(&self) -> Result<Arc<FockBasis>> {
        enumerate_basis(self.modes(), self.system_cutoff)
    }

    /// Number of controlled-phase gates in the Λ circuit.
    pub fn controlled_phase_calls(&self) -> usize {
        if self.psi_g.has_displacement() {
            2
        } else {
            1
        }
    }
}

/// Output of the Λ-preparation circuit.
#[derive(Debug, Clone)]
pub struct LambdaState {
    pub register: AncillaRegister,
    /// Largest norm lost at the system cutoff by any gate.
    pub leakage: f64,
    pub controlled_phase_calls: usize,
}

fn squeeze_layer(state: &StateVector, squeezings: &[f64], factor: f64) -> Result<GateOutput> {
    let mut current = state.clone();
    let mut leakage = 0.0;
    for (mode, &r) in squeezings.iter().enumerate() {
        let out = apply_single_mode(&current, SingleModeGate::Squeeze(factor * r), mode)?;
        leakage += out.leakage;
        current = out.state;
    }
    Ok(GateOutput { state: current, leakage })
}

fn displacement_layer(state: &StateVector, alphas: &[C64], factor: f64) -> Result<GateOutput> {
    let mut current = state.clone();
    let mut leakage = 0.0;
    for (mode, &a) in alphas.iter().enumerate() {
        let out = apply_single_mode(&current, SingleModeGate::Displace(a * factor), mode)?;
        leakage += out.leakage;
        current = out.state;
    }
    Ok(GateOutput { state: current, leakage })
}

/// Run the gadget circuit
/// `(⊗D_{α/2}) U_CP(π) (⊗D_{-α/2}) U_L (⊗S_{r/2}) U_CP(π/2) (⊗S_{-r/2})` on
/// `|α⟩|0⟩`. The displacement sandwich is skipped when `Ψ_G` has none.
pub fn prepare_lambda(inst: &HadamardInstance) -> Result<LambdaState> {
    let spec = &inst.psi_g;
    let basis = inst.system_basis()?;
    let mut reg = AncillaRegister::coherent(inst.alpha, inst.ancilla_cutoff, StateVector::vacuum(basis));
    let mut leakage = 0.0f64;
    let mut calls = 0;

    let (r, l) = reg.map_system(|s| squeeze_layer(s, &spec.squeezings, -0.5))?;
    reg = r.controlled_phase(PI / 2.0);
    calls += 1;
    leakage = leakage.max(l);
    let (r, l) = reg.map_system(|s| squeeze_layer(s, &spec.squeezings, 0.5))?;
    leakage = leakage.max(l);
    let (r, _) = r.map_system(|s| Ok(GateOutput { state: apply_interferometer(s, &spec.interferometer)?, leakage: 0.0 }))?;
    reg = r;

    if spec.has_displacement() {
        let (r, l) = reg.map_system(|s| displacement_layer(s, &spec.displacements, -0.5))?;
        leakage = leakage.max(l);
        reg = r.controlled_phase(PI);
        calls += 1;
        let (r, l) = reg.map_system(|s| displacement_layer(s, &spec.displacements, 0.5))?;
        leakage = leakage.max(l);
        reg = r;
    }
    Ok(LambdaState { register: reg, leakage, controlled_phase_calls: calls })
}

/// `|φ₊⟩|0⟩ + |φ₋⟩|Ψ_G⟩` assembled directly from the cat components and the
/// Gaussian state.
pub fn lambda_reference(inst: &HadamardInstance) -> Result<AncillaRegister> {
    let basis = inst.system_basis()?;
    let psi = apply_gaussian(&StateVector::vacuum(basis.clone()), &inst.psi_g)?.state;
    let vac = StateVector::vacuum(basis);
    let coeffs = coherent_coefficients(inst.alpha, inst.ancilla_cutoff);
    let branches = (0..coeffs.len()).map(|j| if j % 2 == 0 { vac.clone() } else { psi.clone() }).collect();
    AncillaRegister::from_branches(coeffs, branches)
}

/// Probabilities of projecting `(I ⊗ V)|Λ⟩` onto `|α⟩|Ψ'_G⟩` and onto
/// `e^{-iπn_0/2}|α⟩|Ψ'_G⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HadamardProbabilities {
    pub p_real: f64,
    pub p_imag: f64,
}

/// All quantities of one Hadamard run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HadamardRun {
    pub probabilities: HadamardProbabilities,
    /// `⟨Ψ'_G|0⟩`.
    pub overlap0: C64,
    /// `|⟨Ψ'_G|V|Ψ_G⟩|²`, the independently estimated magnitude.
    pub vsq: f64,
    /// `⟨Ψ'_G|V|Ψ_G⟩` by direct inner product.
    pub direct: C64,
    pub leakage: f64,
    pub controlled_phase_calls: usize,
}

/// Prepare Λ, apply `V` to the system, and project.
pub fn hadamard_run(inst: &HadamardInstance) -> Result<HadamardRun> {
    let lambda = prepare_lambda(inst)?;
    let (evolved, _) = lambda.register.map_system(|s| Ok(GateOutput { state: inst.v.apply(s)?, leakage: 0.0 }))?;
    let basis = inst.system_basis()?;
    let vac = StateVector::vacuum(basis.clone());
    let prime = apply_gaussian(&vac, &inst.psi_g_prime)?;
    let psi = apply_gaussian(&vac, &inst.psi_g)?;

    let bra = coherent_coefficients(inst.alpha, inst.ancilla_cutoff);
    let bra_real: Vec<C64> = bra.iter().map(|c| c.conj()).collect();
    // ⟨α| e^{iπ n/2} |j⟩ = conj(c_j) i^j
    let bra_imag: Vec<C64> = bra.iter().enumerate().map(|(j, c)| c.conj() * C64::i().powu(j as u32)).collect();
    let p_real = evolved.project(&bra_real, &prime.state)?.norm_sqr();
    let p_imag = evolved.project(&bra_imag, &prime.state)?.norm_sqr();

    let direct = inner_product(&prime.state, &inst.v.apply(&psi.state)?)?;
    Ok(HadamardRun {
        probabilities: HadamardProbabilities { p_real, p_imag },
        overlap0: inner_product(&prime.state, &vac)?,
        vsq: direct.norm_sqr(),
        direct,
        leakage: lambda.leakage.max(prime.leakage).max(psi.leakage),
        controlled_phase_calls: lambda.controlled_phase_calls,
    })
}

pub fn hadamard_probabilities(inst: &HadamardInstance) -> Result<HadamardProbabilities> {
    Ok(hadamard_run(inst)?.probabilities)
}

/// Closed-form probabilities for given `⟨Ψ'_G|0⟩`, amplitude `A` and `α`:
/// `e^{-2x}|ch·ov + sh·A|²` and `e^{-2x}|c·ov + i s·A|²` with `x = |α|²`.
pub fn closed_form_probabilities(overlap0: C64, amplitude: C64, alpha: C64) -> HadamardProbabilities {
    let x = alpha.norm_sqr();
    let damp = (-2.0 * x).exp();
    let p_real = damp * (overlap0 * x.cosh() + amplitude * x.sinh()).norm_sqr();
    let p_imag = damp * (overlap0 * x.cos() + C64::i() * amplitude * x.sin()).norm_sqr();
    HadamardProbabilities { p_real, p_imag }
}

/// Coefficients `c_1, c_2, c_3` of the real-part probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HadamardCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl HadamardCoefficients {
    pub fn real(alpha: C64) -> Self {
        let x = alpha.norm_sqr();
        let d = (-2.0 * x).exp();
        Self { c1: d * x.cosh().powi(2), c2: d * x.sinh().powi(2), c3: 2.0 * d * x.cosh() * x.sinh() }
    }

    /// Counterparts for the rotated projection (`c3` multiplies `-Im`).
    pub fn imag(alpha: C64) -> Self {
        let x = alpha.norm_sqr();
        let d = (-2.0 * x).exp();
        Self { c1: d * x.cos().powi(2), c2: d * x.sin().powi(2), c3: 2.0 * d * x.cos() * x.sin() }
    }
}

/// Recovered amplitude and the magnification of probability errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    pub amplitude: C64,
    /// `Re` and `Im` of `⟨0|Ψ'_G⟩⟨Ψ'_G|V|Ψ_G⟩`.
    pub product: C64,
    /// `e^{2|α|²} / (2 ch sh)`.
    pub conditioning_real: f64,
    /// `e^{2|α|²} / (2 c s)`.
    pub conditioning_imag: f64,
}

/// Invert the two probability relations for `⟨0|Ψ'_G⟩⟨Ψ'_G|V|Ψ_G⟩` and
/// divide by `⟨0|Ψ'_G⟩ = conj(overlap0)`.
pub fn recover_amplitude(p_real: f64, p_imag: f64, overlap0: C64, vsq: f64, alpha: C64, margin: f64) -> Result<Recovery> {
    let x = alpha.norm_sqr();
    let (ch, sh, c, s) = (x.cosh(), x.sinh(), x.cos(), x.sin());
    for (name, v) in [("sinh(|α|²)", sh), ("sin(|α|²)", s), ("cos(|α|²)", c), ("|⟨Ψ'_G|0⟩|", overlap0.norm())] {
        if !(v.abs() >= margin) {
            return Err(Error::IllConditioned(format!("{name} = {v:.3e} is below the margin {margin:.1e}")));
        }
    }
    let e2x = (2.0 * x).exp();
    let ov2 = overlap0.norm_sqr();
    let re = e2x / (2.0 * ch * sh) * p_real - ch / (2.0 * sh) * ov2 - sh / (2.0 * ch) * vsq;
    let im = c / (2.0 * s) * ov2 + s / (2.0 * c) * vsq - e2x / (2.0 * c * s) * p_imag;
    let product = C64::new(re, im);
    Ok(Recovery {
        amplitude: product / overlap0.conj(),
        product,
        conditioning_real: e2x / (2.0 * ch * sh),
        conditioning_imag: e2x / (2.0 * c * s),
    })
}

/// Report of a full Hadamard test against the direct inner product.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HadamardReport {
    pub p_real: f64,
    pub p_imag: f64,
    pub recovered_re: f64,
    pub recovered_im: f64,
    pub direct_re: f64,
    pub direct_im: f64,
    pub abs_err: f64,
    pub conditioning: [f64; 2],
    /// `|p_real - closed form|` and `|p_imag - closed form|`.
    pub closed_form_err: [f64; 2],
    /// Distance between the circuit Λ and `|φ₊⟩|0⟩ + |φ₋⟩|Ψ_G⟩`.
    pub lambda_err: f64,
    pub lambda_norm_err: f64,
    pub leakage: f64,
    pub controlled_phase_calls: usize,
}

pub fn run_hadamard(inst: &HadamardInstance, margin: f64) -> Result<HadamardReport> {
    let run = hadamard_run(inst)?;
    let p = run.probabilities;
    let rec = recover_amplitude(p.p_real, p.p_imag, run.overlap0, run.vsq, inst.alpha, margin)?;
    let closed = closed_form_probabilities(run.overlap0, run.direct, inst.alpha);
    let lambda = prepare_lambda(inst)?;
    let reference = lambda_reference(inst)?;
    Ok(HadamardReport {
        p_real: p.p_real,
        p_imag: p.p_imag,
        recovered_re: rec.amplitude.re,
        recovered_im: rec.amplitude.im,
        direct_re: run.direct.re,
        direct_im: run.direct.im,
        abs_err: (rec.amplitude - run.direct).norm(),
        conditioning: [rec.conditioning_real, rec.conditioning_imag],
        closed_form_err: [(p.p_real - closed.p_real).abs(), (p.p_imag - closed.p_imag).abs()],
        lambda_err: lambda.register.distance(&reference)?,
        lambda_norm_err: (lambda.register.norm_sqr().sqrt() - 1.0).abs(),
        leakage: run.leakage,
        controlled_phase_calls: run.controlled_phase_calls,
    })
}

/// A random small instance: Haar interferometers, squeezings in `[0, r_max]`,
/// displacements of modulus at most `d_max`, and a Kerr `V` with coefficients
/// in `[0, 1]` evolved for a time in `[0, 2π)`.
pub fn random_instance<R: rand::Rng + ?Sized>(
    rng: &mut R,
    modes: usize,
    alpha: C64,
    r_max: f64,
    d_max: f64,
) -> Result<HadamardInstance> {
    let spec = |rng: &mut R| -> Result<GaussianSpec> {
        let squeezings = (0..modes).map(|_| rng.random_range(0.0..=r_max)).collect();
        let u = crate::gaussian::haar_unitary_with(modes, rng);
        let displacements = (0..modes)
            .map(|_| C64::from_polar(rng.random_range(0.0..=d_max), rng.random_range(0.0..2.0 * PI)))
            .collect();
        GaussianSpec::new(squeezings, u, displacements)
    };
    let psi_g = spec(rng)?;
    let psi_g_prime = spec(rng)?;
    let eta = (0..modes).map(|_| rng.random_range(0.0..1.0)).collect();
    let mu = (0..modes).map(|_| rng.random_range(0.0..1.0)).collect();
    let h = DiagonalHamiltonian::new(eta, mu, None, false)?;
    let t = rng.random_range(0.0..2.0 * PI);
    HadamardInstance::new(psi_g, psi_g_prime, NumberConservingOp::Kerr { h, t, sign: 1.0 }, alpha, None)
}
