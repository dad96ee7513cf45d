//! Gaussian unitaries in the Fock picture: squeezers, displacements, phase
//! shifters and linear interferometers, plus the squeezed GBS input state.

mod clements;
mod gates;
mod haar;
pub mod io;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use clements::{clements_decompose, InterferometerDecomposition, Rotation, UNITARITY_TOLERANCE};
pub use gates::{
    apply_decomposition, apply_interferometer, apply_single_mode, apply_two_mode_block, beamsplitter_block,
    gate_matrix_elements, padded_gate_matrix, single_mode_gate_matrix, two_mode_fock_matrix, SingleModeGate, GENERATOR_PADDING,
};
pub use haar::{haar_unitary, haar_unitary_with};

use crate::error::{Error, Result};
use crate::fock::{FockBasis, GateOutput, StateVector};
use crate::numeric::{unitarity_deviation, Matrix, C64};

/// Default bound on the photon-number tail mass discarded by truncation.
pub const DEFAULT_TAIL_THRESHOLD: f64 = 1e-10;

/// A pure Gaussian unitary written as squeezers, then an interferometer, then
/// displacements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSpec {
    pub mode_count: usize,
    pub squeezings: Vec<f64>,
    #[serde(with = "io::matrix_serde")]
    pub interferometer: Matrix,
    pub displacements: Vec<C64>,
}

impl GaussianSpec {
    pub fn new(squeezings: Vec<f64>, interferometer: Matrix, displacements: Vec<C64>) -> Result<Self> {
        let spec = Self { mode_count: squeezings.len(), squeezings, interferometer, displacements };
        spec.validate()?;
        Ok(spec)
    }

    /// The identity operation on `modes` modes.
    pub fn identity(modes: usize) -> Self {
        Self {
            mode_count: modes,
            squeezings: vec![0.0; modes],
            interferometer: Matrix::identity(modes, modes),
            displacements: vec![C64::new(0.0, 0.0); modes],
        }
    }

    /// `k` equal squeezers on the leading modes followed by `u`; applied to
    /// vacuum this gives the GBS output state `U|Ψ_in⟩`.
    pub fn gbs(k: usize, r: f64, u: Matrix) -> Result<Self> {
        let m = u.nrows();
        if k > m {
            return Err(Error::InvalidParameter(format!("{k} squeezers on {m} modes")));
        }
        let mut squeezings = vec![0.0; m];
        squeezings[..k].iter_mut().for_each(|s| *s = r);
        Self::new(squeezings, u, vec![C64::new(0.0, 0.0); m])
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.mode_count;
        if self.squeezings.len() != m || self.displacements.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "{} squeezings and {} displacements for {m} modes",
                self.squeezings.len(),
                self.displacements.len()
            )));
        }
        if self.interferometer.nrows() != m || self.interferometer.ncols() != m {
            return Err(Error::DimensionMismatch(format!("interferometer is not {m}x{m}")));
        }
        let finite = self.squeezings.iter().all(|r| r.is_finite())
            && self.displacements.iter().all(|a| a.re.is_finite() && a.im.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite Gaussian parameter".into()));
        }
        let deviation = unitarity_deviation(&self.interferometer);
        if !(deviation <= UNITARITY_TOLERANCE) {
            return Err(Error::NotUnitary { deviation, tolerance: UNITARITY_TOLERANCE });
        }
        Ok(())
    }

    pub fn has_displacement(&self) -> bool {
        self.displacements.iter().any(|a| a.norm_sqr() > 0.0)
    }

    pub fn has_squeezing(&self) -> bool {
        self.squeezings.iter().any(|&r| r != 0.0)
    }

    /// Smallest total-photon cutoff whose discarded squeezing tail is below
    /// `tail_threshold`, widened by a Poissonian margin for displacements.
    pub fn suggested_cutoff(&self, tail_threshold: f64) -> usize {
        let squeeze_cut = cutoff_for_squeezings(&self.squeezings, tail_threshold);
        let x: f64 = self.displacements.iter().map(|a| a.norm_sqr()).sum();
        if x == 0.0 {
            return squeeze_cut;
        }
        let n = squeeze_cut as f64;
        ((n.sqrt() + x.sqrt()).powi(2) + 10.0 * x.sqrt() + 10.0).ceil() as usize
    }
}

/// Apply `spec` to `state`: squeezers, interferometer, displacements.
/// `leakage` accumulates the norm lost at the truncation boundary.
pub fn apply_gaussian(state: &StateVector, spec: &GaussianSpec) -> Result<GateOutput> {
    spec.validate()?;
    if spec.mode_count != state.basis().modes() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode Gaussian spec on a {}-mode state",
            spec.mode_count,
            state.basis().modes()
        )));
    }
    let mut current = state.clone();
    let mut leakage = 0.0;
    for (mode, &r) in spec.squeezings.iter().enumerate() {
        let out = apply_single_mode(&current, SingleModeGate::Squeeze(r), mode)?;
        leakage += out.leakage;
        current = out.state;
    }
    if spec.interferometer != Matrix::identity(spec.mode_count, spec.mode_count) {
        current = apply_interferometer(&current, &spec.interferometer)?;
    }
    for (mode, &alpha) in spec.displacements.iter().enumerate() {
        let out = apply_single_mode(&current, SingleModeGate::Displace(alpha), mode)?;
        leakage += out.leakage;
        current = out.state;
    }
    Ok(GateOutput { state: current, leakage })
}

/// Single-mode squeezed vacuum `S_r|0⟩` in the Fock basis up to `cutoff`.
/// Coefficients on `|2n⟩` follow `c_n = c_{n-1} (-tanh r) sqrt((2n-1)/(2n))`,
/// which is the closed form `(-tanh r)^n sqrt((2n)!) / (2^n n!) / sqrt(cosh r)`.
pub fn squeezed_vacuum_coefficients(r: f64, cutoff: usize) -> Vec<f64> {
    let mut out = vec![0.0; cutoff + 1];
    let t = -r.tanh();
    let mut c = 1.0 / r.cosh().sqrt();
    out[0] = c;
    for n in 1..=cutoff / 2 {
        c *= t * ((2 * n - 1) as f64 / (2 * n) as f64).sqrt();
        out[2 * n] = c;
    }
    out
}

/// Coherent state `|α⟩` coefficients `e^{-|α|²/2} α^n / sqrt(n!)` up to `cutoff`.
pub fn coherent_coefficients(alpha: C64, cutoff: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(cutoff + 1);
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    out.push(c);
    for n in 1..=cutoff {
        c *= alpha / (n as f64).sqrt();
        out.push(c);
    }
    out
}

/// Probability mass of the total photon number above `cutoff` for
/// independent single-mode squeezed vacua with parameters `squeezings`.
pub fn squeezing_tail_mass(squeezings: &[f64], cutoff: usize) -> f64 {
    let active: Vec<f64> = squeezings.iter().copied().filter(|&r| r != 0.0).collect();
    if active.is_empty() {
        return 0.0;
    }
    let keep_pairs = cutoff / 2;
    let t2max = active.iter().map(|r| r.tanh().powi(2)).fold(0.0, f64::max);
    // pmf length so that the neglected far tail is far below any threshold
    let mut len = keep_pairs + 2;
    while len < 100_000 && t2max.powi(len as i32) * ((len + 1) as f64).powi(active.len() as i32) > 1e-40 {
        len += 16;
    }
    let mut total = vec![1.0];
    for &r in &active {
        let t2 = r.tanh().powi(2);
        let mut single = Vec::with_capacity(len);
        let mut p = 1.0 / r.cosh();
        for n in 0..len {
            single.push(p);
            p *= (0.5 + n as f64) / (n + 1) as f64 * t2;
        }
        let mut next = vec![0.0; len];
        for (i, &a) in total.iter().enumerate() {
            for (j, &b) in single.iter().enumerate().take(len - i) {
                next[i + j] += a * b;
            }
        }
        total = next;
    }
    // small terms first
    total[keep_pairs + 1..].iter().rev().sum()
}

/// Smallest even cutoff whose squeezing tail mass is below `tail_threshold`.
pub fn cutoff_for_squeezings(squeezings: &[f64], tail_threshold: f64) -> usize {
    let mut cutoff = 0;
    while squeezing_tail_mass(squeezings, cutoff) >= tail_threshold {
        cutoff += 2;
    }
    cutoff
}

/// `|Ψ_in⟩ = |ψ_SMS(r)⟩^{⊗K} |0⟩^{⊗(M-K)}` on `basis`, rejecting cutoffs whose
/// discarded tail mass reaches `tail_threshold`.
pub fn prepare_psi_in(k: usize, r: f64, basis: &Arc<FockBasis>, tail_threshold: f64) -> Result<StateVector> {
    let squeezings = vec![r; k.min(basis.modes())];
    let tail = squeezing_tail_mass(&squeezings, basis.cutoff());
    if tail >= tail_threshold {
        return Err(Error::CutoffTooSmall { cutoff: basis.cutoff(), tail, threshold: tail_threshold });
    }
    squeezed_input(k, r, basis)
}

/// Projection of `|Ψ_in⟩` onto the truncated space with no tail check. For
/// quantities confined to photon-number sectors at or below the cutoff (such
/// as amplitudes after number-conserving gates) the projection is exact.
pub fn squeezed_input(k: usize, r: f64, basis: &Arc<FockBasis>) -> Result<StateVector> {
    let m = basis.modes();
    if k > m {
        return Err(Error::InvalidParameter(format!("{k} squeezers on {m} modes")));
    }
    if !r.is_finite() {
        return Err(Error::InvalidParameter("non-finite squeezing".into()));
    }
    let coeffs = squeezed_vacuum_coefficients(r, basis.cutoff());
    Ok(StateVector::from_fn(basis.clone(), |occ| {
        if occ[k..].iter().any(|&s| s != 0) {
            return C64::new(0.0, 0.0);
        }
        C64::new(occ[..k].iter().map(|&s| coeffs[s as usize]).product(), 0.0)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::enumerate_basis;

    fn sector_probabilities(s: &StateVector) -> Vec<f64> {
        s.sector_norms_sqr()
    }

    #[test]
    fn vacuum_input_for_zero_squeezers() {
        let b = enumerate_basis(3, 4).unwrap();
        let s = prepare_psi_in(0, 0.7, &b, 1e-10).unwrap();
        assert_eq!(s.amplitudes(), StateVector::vacuum(b).amplitudes());
    }

    #[test]
    fn two_squeezers_give_geometric_pairs() {
        let r: f64 = 0.4;
        let b = enumerate_basis(2, 40).unwrap();
        let s = prepare_psi_in(2, r, &b, 1e-10).unwrap();
        let probs = sector_probabilities(&s);
        for n in 0..=10 {
            let expected = r.cosh().powi(-2) * r.tanh().powi(2 * n as i32);
            assert!((probs[2 * n] - expected).abs() < 1e-14, "n = {n}");
            assert_eq!(probs[2 * n + 1], 0.0);
        }
    }

    #[test]
    fn one_squeezer_one_pair() {
        let r: f64 = 0.9;
        let b = enumerate_basis(3, 80).unwrap();
        let s = prepare_psi_in(1, r, &b, 1e-10).unwrap();
        let expected = 0.5 / r.cosh() * r.tanh().powi(2);
        assert!((sector_probabilities(&s)[2] - expected).abs() < 1e-15);
    }

    #[test]
    fn small_cutoff_rejected() {
        let b = enumerate_basis(2, 4).unwrap();
        match prepare_psi_in(2, 0.5, &b, 1e-10) {
            Err(Error::CutoffTooSmall { cutoff: 4, tail, .. }) => assert!(tail > 1e-3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tail_mass_matches_norm_deficit() {
        let b = enumerate_basis(3, 10).unwrap();
        let s = squeezed_input(3, 0.6, &b).unwrap();
        let tail = squeezing_tail_mass(&[0.6; 3], 10);
        assert!((1.0 - s.norm_sqr() - tail).abs() < 1e-14);
    }

    #[test]
    fn identity_spec_is_identity() {
        let b = enumerate_basis(2, 5).unwrap();
        let s = StateVector::from_fn(b.clone(), |o| C64::new(o[0] as f64 + 1.0, -(o[1] as f64)));
        let out = apply_gaussian(&s, &GaussianSpec::identity(2)).unwrap();
        assert_eq!(out.state.amplitudes(), s.amplitudes());
        assert_eq!(out.leakage, 0.0);
    }

    #[test]
    fn displacements_on_vacuum_give_coherent_product() {
        let alphas = [C64::new(0.3, 0.1), C64::new(-0.2, 0.25)];
        let b = enumerate_basis(2, 30).unwrap();
        let spec = GaussianSpec::new(vec![0.0; 2], Matrix::identity(2, 2), alphas.to_vec()).unwrap();
        let out = apply_gaussian(&StateVector::vacuum(b.clone()), &spec).unwrap();
        let c0 = coherent_coefficients(alphas[0], 30);
        let c1 = coherent_coefficients(alphas[1], 30);
        for i in 0..b.dimension() {
            let o = b.occupation(i);
            if o[0] + o[1] > 20 {
                continue;
            }
            let expected = c0[o[0] as usize] * c1[o[1] as usize];
            assert!((out.state.amplitudes()[i] - expected).norm() < 1e-12, "{o:?}");
        }
        assert!(out.leakage < 1e-10);
    }

    #[test]
    fn single_squeezer_spec_matches_prepared_input() {
        let r = 0.5;
        let b = enumerate_basis(2, 30).unwrap();
        let spec = GaussianSpec::gbs(1, r, Matrix::identity(2, 2)).unwrap();
        let out = apply_gaussian(&StateVector::vacuum(b.clone()), &spec).unwrap();
        let direct = prepare_psi_in(1, r, &b, 1e-10).unwrap();
        assert!(out.state.distance(&direct).unwrap() < 1e-10);
    }

    #[test]
    fn squeezing_leakage_is_reported() {
        let b = enumerate_basis(1, 6).unwrap();
        let spec = GaussianSpec::new(vec![1.2], Matrix::identity(1, 1), vec![C64::new(0.0, 0.0)]).unwrap();
        let out = apply_gaussian(&StateVector::vacuum(b), &spec).unwrap();
        let tail = squeezing_tail_mass(&[1.2], 6);
        assert!((out.leakage - tail.sqrt()).abs() < 1e-10);
        assert!((out.state.norm() - 1.0).abs() <= out.leakage + 1e-12);
    }

    #[test]
    fn suggested_cutoff_meets_threshold() {
        let spec = GaussianSpec::gbs(2, 0.3, Matrix::identity(3, 3)).unwrap();
        let n = spec.suggested_cutoff(1e-12);
        assert!(squeezing_tail_mass(&spec.squeezings, n) < 1e-12);
        assert!(squeezing_tail_mass(&spec.squeezings, n - 2) >= 1e-12);
    }

    #[test]
    fn non_unitary_spec_rejected() {
        let mut u = Matrix::identity(2, 2);
        u[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(GaussianSpec::gbs(1, 0.1, u), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = GaussianSpec::new(vec![0.3, 0.0], haar_unitary(2, 3), vec![C64::new(0.1, 0.0), C64::new(0.0, -0.2)]).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        let back: GaussianSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
    }
}
