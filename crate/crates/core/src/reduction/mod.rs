//! Amplitude time series of a single-Kerr-layer process and the DFT
//! reconstruction of a collision-free GBS outcome probability from it.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, inner_product, OccupationVector, StateVector};
use crate::gaussian::{apply_interferometer, squeezed_input, squeezing_tail_mass};
use crate::gbs::{chernoff_cutoffs, gbs_probability, GbsInstance};
use crate::kerr::{
    default_photon_bound, kerr_evolve, lemma1_hamiltonian, spectrum, verify_nondegeneracy, DiagonalHamiltonian,
    EnergySpectrum, NondegeneracyReport,
};
use crate::numeric::{pairwise, C64};

/// A GBS instance with a diagonal Hamiltonian that isolates the target
/// outcome `S*` at the integer energy `j*`.
#[derive(Debug, Clone)]
pub struct Gpnl1Instance {
    pub gbs: GbsInstance,
    pub h: DiagonalHamiltonian,
    pub s_star: OccupationVector,
    pub j_star: i64,
    /// Total-photon cutoff of the simulation basis.
    pub cutoff: usize,
    pub strict_regime: bool,
    pub nondegeneracy: NondegeneracyReport,
    prepared: OnceLock<Arc<Prepared>>,
}

#[derive(Debug)]
struct Prepared {
    psi: StateVector,
    tail_mass: f64,
    spectrum: EnergySpectrum,
}

impl Gpnl1Instance {
    /// Validate the instance. `j*` is always recomputed from `energy(S*, H)`
    /// and uniqueness of that energy is checked by exhaustive enumeration up
    /// to `photon_bound` photons (default `N + 3`).
    pub fn new(
        gbs: GbsInstance,
        h: DiagonalHamiltonian,
        s_star: OccupationVector,
        cutoff: usize,
        strict_regime: bool,
        photon_bound: Option<usize>,
    ) -> Result<Self> {
        gbs.validate()?;
        h.validate()?;
        if h.modes() != gbs.m || s_star.modes() != gbs.m {
            return Err(Error::DimensionMismatch("instance, Hamiltonian and target mode counts differ".into()));
        }
        if !h.integer_spectrum {
            return Err(Error::InvalidParameter("the reconstruction needs an integer spectrum".into()));
        }
        if !s_star.collision_free() {
            return Err(Error::CollisionOutcome(s_star));
        }
        let n = s_star.total_photons();
        if strict_regime && !(n < gbs.k && gbs.k < gbs.m) {
            return Err(Error::InvalidParameter(format!(
                "strict regime needs N < K < M, got N = {n}, K = {}, M = {}",
                gbs.k, gbs.m
            )));
        }
        let j_star = h.integer_energy(&s_star)?.expect("integer spectrum checked");
        let bound = photon_bound.unwrap_or_else(|| default_photon_bound(n));
        let nondegeneracy = verify_nondegeneracy(&h, &s_star, bound)?.into_result()?;
        Ok(Self { gbs, h, s_star, j_star, cutoff, strict_regime, nondegeneracy, prepared: OnceLock::new() })
    }

    /// Target `1^N 0^{M-N}` with the non-degenerate Hamiltonian for `N` photons.
    pub fn lemma1(gbs: GbsInstance, n: usize, cutoff: usize, strict_regime: bool) -> Result<Self> {
        let m = gbs.m;
        let h = lemma1_hamiltonian(n, m)?;
        Self::new(gbs, h, OccupationVector::leading_ones(n, m), cutoff, strict_regime, None)
    }

    pub fn photons(&self) -> usize {
        self.s_star.total_photons()
    }

    fn prepared(&self) -> Result<&Arc<Prepared>> {
        if let Some(p) = self.prepared.get() {
            return Ok(p);
        }
        let basis = enumerate_basis(self.gbs.m, self.cutoff)?;
        let psi = apply_interferometer(&squeezed_input(self.gbs.k, self.gbs.r, &basis)?, &self.gbs.u)?;
        let tail_mass = squeezing_tail_mass(&vec![self.gbs.r; self.gbs.k], self.cutoff);
        let spectrum = spectrum(&psi, &self.h)?;
        Ok(self.prepared.get_or_init(|| Arc::new(Prepared { psi, tail_mass, spectrum })))
    }

    /// Truncated `U|Ψ_in⟩`; interferometers conserve photon number, so this
    /// is the exact projection of the untruncated state.
    pub fn output_state(&self) -> Result<StateVector> {
        Ok(self.prepared()?.psi.clone())
    }

    /// Probability mass of `U|Ψ_in⟩` above the cutoff.
    pub fn tail_mass(&self) -> Result<f64> {
        Ok(self.prepared()?.tail_mass)
    }

    pub fn spectrum(&self) -> Result<EnergySpectrum> {
        Ok(self.prepared()?.spectrum.clone())
    }
}

/// An amplitude with its truncation error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub value: C64,
    pub error_bound: f64,
}

/// `A_t = ⟨Ψ_in|U† e^{iHt} U|Ψ_in⟩`. `H` is diagonal, so the discarded
/// high-photon component contributes at most its own mass.
pub fn amplitude(inst: &Gpnl1Instance, t: f64) -> Result<Amplitude> {
    let p = inst.prepared()?;
    let value = inner_product(&p.psi, &kerr_evolve(&p.psi, &inst.h, t)?)?;
    Ok(Amplitude { value, error_bound: p.tail_mass })
}

/// `A_{t_k}` on the grid `t_k = 2πk / J_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSeries {
    pub j_max: usize,
    pub values: Vec<C64>,
    pub errors: Vec<f64>,
}

impl AmplitudeSeries {
    pub fn grid_time(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.j_max as f64
    }

    /// Series of `Σ_j p_j e^{i j t_k}` for a synthetic integer spectrum.
    pub fn from_spectrum(lines: &[(i64, f64)], j_max: usize) -> Self {
        let values = (0..j_max)
            .map(|k| {
                let terms: Vec<C64> = lines.iter().map(|&(j, p)| C64::from_polar(p, grid_angle(k, j, j_max))).collect();
                pairwise(&terms)
            })
            .collect();
        Self { j_max, values, errors: vec![0.0; j_max] }
    }

    /// Add `noise[k]` to every value, widening the error estimates.
    pub fn perturbed(&self, noise: &[C64]) -> Result<Self> {
        if noise.len() != self.j_max {
            return Err(Error::DimensionMismatch(format!("{} noise terms for {} values", noise.len(), self.j_max)));
        }
        Ok(Self {
            j_max: self.j_max,
            values: self.values.iter().zip(noise).map(|(v, n)| v + n).collect(),
            errors: self.errors.iter().zip(noise).map(|(e, n)| e + n.norm()).collect(),
        })
    }
}

// 2π k j / J reduced modulo J first, so large products keep full precision
fn grid_angle(k: usize, j: i64, j_max: usize) -> f64 {
    let jm = j_max as i128;
    let reduced = ((k as i128 * j as i128) % jm + jm) % jm;
    2.0 * PI * reduced as f64 / j_max as f64
}

pub fn amplitude_series(inst: &Gpnl1Instance, j_max: usize) -> Result<AmplitudeSeries> {
    if j_max == 0 {
        return Err(Error::InvalidParameter("J_max must be at least 1".into()));
    }
    inst.prepared()?;
    let results: Vec<Amplitude> = (0..j_max)
        .into_par_iter()
        .map(|k| amplitude(inst, 2.0 * PI * k as f64 / j_max as f64))
        .collect::<Result<_>>()?;
    Ok(AmplitudeSeries {
        j_max,
        values: results.iter().map(|a| a.value).collect(),
        errors: results.iter().map(|a| a.error_bound).collect(),
    })
}

/// `Q = (1/J) Σ_k A_{t_k} e^{-2πi k j*/J}`; `q` is its real part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub q: f64,
    pub imag_residue: f64,
    /// `(1/J) Σ_k error_k`, a bound on the error inherited from the values.
    pub error_budget: f64,
}

pub fn reconstruct(series: &AmplitudeSeries, j_star: i64) -> Result<Reconstruction> {
    let j = series.j_max;
    if j_star < 0 || j_star >= j as i64 {
        return Err(Error::TargetOutOfRange { j_star, j_max: j });
    }
    let terms: Vec<C64> = series
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| v * C64::from_polar(1.0, -grid_angle(k, j_star, j)))
        .collect();
    let sum = pairwise(&terms) / j as f64;
    Ok(Reconstruction { q: sum.re, imag_residue: sum.im, error_budget: pairwise(&series.errors) / j as f64 })
}

/// How `run_theorem1` chooses the DFT length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JmaxPolicy {
    /// The formula value when its applicability condition holds, else the fallback.
    Auto,
    /// `N⁴(N+2)²` regardless of applicability.
    Formula,
    /// `1 + max energy` on the truncated space: no aliasing there.
    Fallback,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub j_max: usize,
    pub j_max_source: String,
    pub j_star: i64,
    pub regime_ok: bool,
    pub n_star: f64,
    pub q: f64,
    pub imag_residue: f64,
    pub p_oracle: f64,
    pub abs_err: f64,
    /// `exp(-c N log N)`.
    pub lemma2_bound: f64,
    /// `Σ_{j≥1} p_{j* + j J_max}` on the truncated space.
    pub aliasing_mass: f64,
    /// Truncated-space mass at energies `≥ J_max` plus the truncation tail.
    pub energy_tail: f64,
    pub truncation_tail: f64,
    pub amplitude_error_budget: f64,
    pub pass: bool,
}

/// Reconstruct `P(S*)` from the amplitude series and compare with the
/// Hafnian oracle. Passes when `|Q - P| ≤ aliasing + amplitude budget + tol`.
pub fn run_theorem1(inst: &Gpnl1Instance, c: f64, policy: JmaxPolicy, tol: f64) -> Result<(Theorem1Report, AmplitudeSeries)> {
    let n = inst.photons();
    let cut = chernoff_cutoffs(inst.gbs.k, inst.gbs.r, n.max(2), c);
    let spec = inst.spectrum()?;
    let fallback = 1 + spec.max_energy().unwrap_or(0.0) as usize;
    let (j_max, source) = match policy {
        JmaxPolicy::Auto if cut.regime_ok => (cut.j_max as usize, "formula"),
        JmaxPolicy::Auto | JmaxPolicy::Fallback => (fallback, "fallback"),
        JmaxPolicy::Formula => (cut.j_max as usize, "formula"),
        JmaxPolicy::Fixed(j) => (j, "fixed"),
    };
    let series = amplitude_series(inst, j_max)?;
    let rec = reconstruct(&series, inst.j_star)?;
    let p_oracle = gbs_probability(&inst.gbs, &inst.s_star)?;

    let mut aliased = Vec::new();
    let mut above = Vec::new();
    for (&e, &p) in spec.theta.iter().zip(&spec.weights) {
        let e = e as i64;
        if e != inst.j_star && e >= inst.j_star && (e - inst.j_star) % j_max as i64 == 0 {
            aliased.push(p);
        }
        if e >= j_max as i64 {
            above.push(p);
        }
    }
    let aliasing_mass = pairwise(&aliased);
    let truncation_tail = inst.tail_mass()?;
    let energy_tail = pairwise(&above) + truncation_tail;
    let abs_err = (rec.q - p_oracle).abs();
    let report = Theorem1Report {
        j_max,
        j_max_source: source.to_string(),
        j_star: inst.j_star,
        regime_ok: cut.regime_ok,
        n_star: cut.n_star,
        q: rec.q,
        imag_residue: rec.imag_residue,
        p_oracle,
        abs_err,
        lemma2_bound: cut.tail_bound,
        aliasing_mass,
        energy_tail,
        truncation_tail,
        amplitude_error_budget: rec.error_budget,
        pass: abs_err <= aliasing_mass + rec.error_budget + tol,
    };
    Ok((report, series))
}
