use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, FockBasis, GateOutput, StateVector};
use crate::gaussian::coherent_coefficients;
use crate::numeric::C64;

/// Joint state of an ancilla mode and `M` system modes, stored as
/// `Σ_j coeff_j |j⟩ ⊗ |class(j)⟩`. The ancilla photon number is conserved by
/// every gate of the Hadamard circuit, so each ancilla level carries its own
/// system vector; levels whose system vectors coincide share one entry.
#[derive(Debug, Clone)]
pub struct AncillaRegister {
    pub(crate) coeffs: Vec<C64>,
    pub(crate) class_of: Vec<usize>,
    pub(crate) classes: Vec<StateVector>,
}

impl AncillaRegister {
    /// `|α⟩ ⊗ |sys⟩` with the ancilla truncated at `ancilla_cutoff`.
    pub fn coherent(alpha: C64, ancilla_cutoff: usize, system: StateVector) -> Self {
        Self {
            coeffs: coherent_coefficients(alpha, ancilla_cutoff),
            class_of: vec![0; ancilla_cutoff + 1],
            classes: vec![system],
        }
    }

    /// Build a register from explicit per-level system vectors.
    pub fn from_branches(coeffs: Vec<C64>, branches: Vec<StateVector>) -> Result<Self> {
        if coeffs.len() != branches.len() || coeffs.is_empty() {
            return Err(Error::DimensionMismatch("one system branch per ancilla level required".into()));
        }
        Ok(Self { class_of: (0..branches.len()).collect(), coeffs, classes: branches })
    }

    pub fn ancilla_cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn system_basis(&self) -> &Arc<FockBasis> {
        self.classes[0].basis()
    }

    /// System vector attached to ancilla level `j` (including its coefficient).
    pub fn branch(&self, j: usize) -> StateVector {
        self.classes[self.class_of[j]].scaled(self.coeffs[j])
    }

    pub fn distinct_branches(&self) -> usize {
        self.classes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        let terms: Vec<f64> =
            (0..self.coeffs.len()).map(|j| self.coeffs[j].norm_sqr() * self.classes[self.class_of[j]].norm_sqr()).collect();
        crate::numeric::pairwise(&terms)
    }

    /// `sqrt(Σ_j ‖branch_j - other_j‖²)`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::DimensionMismatch("registers have different ancilla cutoffs".into()));
        }
        let terms = (0..self.coeffs.len())
            .map(|j| Ok(self.branch(j).distance(&other.branch(j))?.powi(2)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(crate::numeric::pairwise(&terms).sqrt())
    }

    /// Apply a system-only gate to every distinct branch. The largest branch
    /// leakage bounds the leakage of the joint state.
    pub fn map_system<F>(&self, gate: F) -> Result<(Self, f64)>
    where
        F: Fn(&StateVector) -> Result<GateOutput>,
    {
        let mut leakage = 0.0f64;
        let mut classes = Vec::with_capacity(self.classes.len());
        for c in &self.classes {
            let out = gate(c)?;
            leakage = leakage.max(out.leakage);
            classes.push(out.state);
        }
        Ok((Self { coeffs: self.coeffs.clone(), class_of: self.class_of.clone(), classes }, leakage))
    }

    /// `U_CP(φ) = exp(-i φ n_0 Σ_k n_k)`: level `j` receives the system phase
    /// `exp(-i φ j N)`. When `φ` is a rational multiple of `2π` with period
    /// `p`, levels with equal `j mod p` and equal input branch coincide.
    pub fn controlled_phase(&self, phi: f64) -> Self {
        let period = phase_period(phi);
        let mut keys: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut classes = Vec::new();
        let mut class_of = Vec::with_capacity(self.coeffs.len());
        for j in 0..self.coeffs.len() {
            let multiple = period.map_or(j, |p| j % p);
            let key = (self.class_of[j], multiple);
            let idx = *keys.entry(key).or_insert_with(|| {
                let angle = -phi * multiple as f64;
                let src = &self.classes[key.0];
                classes.push(crate::fock::apply_diagonal_phase(src, |s| angle * total(s) as f64));
                classes.len() - 1
            });
            class_of.push(idx);
        }
        Self { coeffs: self.coeffs.clone(), class_of, classes }
    }

    /// `⟨a| ⊗ ⟨sys|` applied to the register, with ancilla bra coefficients
    /// `bra[j] = ⟨a|j⟩`.
    pub fn project(&self, bra: &[C64], sys: &StateVector) -> Result<C64> {
        let overlaps = self
            .classes
            .iter()
            .map(|c| crate::fock::inner_product(sys, c))
            .collect::<Result<Vec<C64>>>()?;
        let terms: Vec<C64> =
            (0..self.coeffs.len()).map(|j| bra.get(j).copied().unwrap_or_default() * self.coeffs[j] * overlaps[self.class_of[j]]).collect();
        Ok(crate::numeric::pairwise(&terms))
    }

    /// Dense `(M+1)`-mode vector, ancilla first, on a basis wide enough to hold
    /// every branch without truncation.
    pub fn to_state(&self) -> Result<StateVector> {
        let sys = self.system_basis();
        let l = self.ancilla_cutoff();
        let basis = enumerate_basis(sys.modes() + 1, sys.cutoff() + l)?;
        let branches: Vec<StateVector> = (0..=l).map(|j| self.branch(j)).collect();
        Ok(StateVector::from_fn(basis, |occ| {
            let j = occ[0] as usize;
            if j > l {
                return C64::new(0.0, 0.0);
            }
            match sys.index_of(&occ[1..]) {
                Some(i) => branches[j].amplitudes()[i],
                None => C64::new(0.0, 0.0),
            }
        }))
    }
}

fn total(s: &[u32]) -> u64 {
    s.iter().map(|&x| x as u64).sum()
}

// smallest p <= 64 with p φ ≡ 0 (mod 2π), if any
fn phase_period(phi: f64) -> Option<usize> {
    let turns = phi / (2.0 * PI);
    (1..=64).find(|&p| {
        let x = turns * p as f64;
        (x - x.round()).abs() < 1e-12
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periods() {
        assert_eq!(phase_period(PI / 2.0), Some(4));
        assert_eq!(phase_period(PI), Some(2));
        assert_eq!(phase_period(0.0), Some(1));
        assert_eq!(phase_period(1.0), None);
    }

    #[test]
    fn controlled_phase_shares_branches() {
        let b = enumerate_basis(2, 4).unwrap();
        let sys = StateVector::from_fn(b, |o| C64::new(1.0 + o[0] as f64, o[1] as f64));
        let reg = AncillaRegister::coherent(C64::new(0.8, 0.0), 19, sys);
        let cp = reg.controlled_phase(PI / 2.0);
        assert_eq!(cp.distinct_branches(), 4);
        let cp2 = cp.controlled_phase(PI);
        assert_eq!(cp2.distinct_branches(), 4);
        let generic = reg.controlled_phase(0.3);
        assert_eq!(generic.distinct_branches(), 20);
        assert!((cp.norm_sqr() - reg.norm_sqr()).abs() < 1e-12);
    }
}
