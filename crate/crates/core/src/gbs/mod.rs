//! Exact GBS outcome probabilities through Hafnians, with the squeezed-light
//! photon-number statistics used for truncation and Chernoff tail bounds.

mod hafnian;
mod stats;

use serde::{Deserialize, Serialize};

pub use hafnian::{hafnian, SymmetricComplexMatrix, HAFNIAN_LIMIT};
pub use stats::{
    chernoff_bound, chernoff_check, chernoff_cutoffs, exact_photon_tail, pair_distribution, pair_distribution_table,
    ChernoffCutoffs, ChernoffReport,
};

use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, OccupationVector};
use crate::gaussian::{apply_interferometer, io::matrix_serde, squeezed_input, GaussianSpec, UNITARITY_TOLERANCE};
use crate::numeric::{unitarity_deviation, Matrix, C64};

/// `K` equal squeezers (parameter `r`) on the leading modes of an `M`-mode
/// interferometer `U`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GbsInstance {
    #[serde(with = "matrix_serde")]
    pub u: Matrix,
    pub r: f64,
    pub k: usize,
    pub m: usize,
}

impl GbsInstance {
    pub fn new(u: Matrix, r: f64, k: usize) -> Result<Self> {
        let inst = Self { m: u.nrows(), u, r, k };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if self.u.nrows() != self.m || self.u.ncols() != self.m {
            return Err(Error::DimensionMismatch(format!("interferometer is not {0}x{0}", self.m)));
        }
        if self.k > self.m {
            return Err(Error::InvalidParameter(format!("{} squeezers on {} modes", self.k, self.m)));
        }
        if !self.r.is_finite() {
            return Err(Error::InvalidParameter("non-finite squeezing".into()));
        }
        let deviation = unitarity_deviation(&self.u);
        if !(deviation <= UNITARITY_TOLERANCE) {
            return Err(Error::NotUnitary { deviation, tolerance: UNITARITY_TOLERANCE });
        }
        Ok(())
    }

    /// Gaussian preparation `U S^{⊗K}` acting on vacuum.
    pub fn gaussian_spec(&self) -> Result<GaussianSpec> {
        GaussianSpec::gbs(self.k, self.r, self.u.clone())
    }

    /// `B = U_K tanh(r) U_Kᵀ`, with `U_K` the columns of `U` on squeezed modes.
    pub fn b_matrix(&self) -> SymmetricComplexMatrix {
        let uk = self.u.columns(0, self.k);
        let b = (&uk * uk.transpose()) * C64::new(self.r.tanh(), 0.0);
        // symmetrise away rounding so validation never trips
        let b = (&b + b.transpose()) * C64::new(0.5, 0.0);
        SymmetricComplexMatrix::new(b).expect("symmetric by construction")
    }
}

fn check_outcome(inst: &GbsInstance, s: &OccupationVector) -> Result<()> {
    if s.modes() != inst.m {
        return Err(Error::DimensionMismatch(format!("outcome has {} modes, instance {}", s.modes(), inst.m)));
    }
    Ok(())
}

/// `P_S = |Haf(B_S)|² / cosh^K(r)` for a collision-free outcome `S`.
pub fn gbs_probability(inst: &GbsInstance, s: &OccupationVector) -> Result<f64> {
    check_outcome(inst, s)?;
    if !s.collision_free() {
        return Err(Error::CollisionOutcome(s.clone()));
    }
    if s.total_photons() % 2 == 1 {
        return Ok(0.0);
    }
    let modes: Vec<usize> = (0..inst.m).filter(|&i| s[i] == 1).collect();
    let h = hafnian(&inst.b_matrix().submatrix(&modes))?;
    Ok(h.norm_sqr() / inst.r.cosh().powi(inst.k as i32))
}

/// `|⟨S|U|Ψ_in⟩|²` from the Fock simulator. The interferometer conserves
/// photon number, so the input projected onto sectors with at most `|S|`
/// photons gives this amplitude exactly; no truncation error enters.
pub fn fock_probability(inst: &GbsInstance, s: &OccupationVector) -> Result<f64> {
    check_outcome(inst, s)?;
    let basis = enumerate_basis(inst.m, s.total_photons())?;
    let out = apply_interferometer(&squeezed_input(inst.k, inst.r, &basis)?, &inst.u)?;
    Ok(out.amplitude(s.as_slice()).norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{haar_unitary, prepare_psi_in};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn vacuum_outcome() {
        let inst = GbsInstance::new(haar_unitary(4, 1), 0.6, 3).unwrap();
        let p = gbs_probability(&inst, &OccupationVector::vacuum(4)).unwrap();
        assert!((p - 0.6f64.cosh().powi(-3)).abs() < 1e-15);
        assert!((fock_probability(&inst, &OccupationVector::vacuum(4)).unwrap() - p).abs() < 1e-15);
    }

    #[test]
    fn odd_outcomes_vanish() {
        let inst = GbsInstance::new(haar_unitary(4, 2), 0.6, 3).unwrap();
        assert_eq!(gbs_probability(&inst, &OccupationVector::new(vec![1, 1, 1, 0])).unwrap(), 0.0);
        assert!(fock_probability(&inst, &OccupationVector::new(vec![1, 0, 1, 1])).unwrap() < 1e-30);
    }

    #[test]
    fn beamsplitter_coincidence() {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let u = Matrix::from_row_slice(2, 2, &[h, h, h, -h]);
        let inst = GbsInstance::new(u, 0.7, 1).unwrap();
        let s = OccupationVector::new(vec![1, 1]);
        let p_h = gbs_probability(&inst, &s).unwrap();
        let p_f = fock_probability(&inst, &s).unwrap();
        assert!((p_h - p_f).abs() < 1e-10);
        // one pair split evenly: |c_1|²/2 with c_1 = -tanh r / sqrt(2 cosh r)
        assert!((p_h - 0.7f64.tanh().powi(2) / (4.0 * 0.7f64.cosh())).abs() < 1e-15);
    }

    #[test]
    fn collisions_rejected() {
        let inst = GbsInstance::new(haar_unitary(3, 2), 0.3, 2).unwrap();
        assert!(matches!(
            gbs_probability(&inst, &OccupationVector::new(vec![2, 0, 0])),
            Err(Error::CollisionOutcome(_))
        ));
    }

    #[test]
    fn oracle_equivalence_on_random_instances() {
        for seed in 0..20u64 {
            let m = 3 + (seed % 3) as usize;
            let k = 1 + (seed % 3) as usize;
            let inst = GbsInstance::new(haar_unitary(m, seed), 0.2 + 0.05 * (seed % 4) as f64, k).unwrap();
            for n in [2usize, 4] {
                if n > m {
                    continue;
                }
                let s = OccupationVector::leading_ones(n, m);
                let p_h = gbs_probability(&inst, &s).unwrap();
                let p_f = fock_probability(&inst, &s).unwrap();
                assert!((p_h - p_f).abs() < 1e-12, "seed {seed}: {p_h} vs {p_f}");
            }
        }
    }

    #[test]
    fn sector_projection_matches_converged_state() {
        let inst = GbsInstance::new(haar_unitary(3, 9), 0.3, 2).unwrap();
        let basis = enumerate_basis(3, 24).unwrap();
        let full = apply_interferometer(&prepare_psi_in(2, 0.3, &basis, 1e-10).unwrap(), &inst.u).unwrap();
        for s in [[1u32, 1, 0], [0, 1, 1], [1, 0, 1]] {
            let p = fock_probability(&inst, &OccupationVector::new(s.to_vec())).unwrap();
            assert!((full.amplitude(&s).norm_sqr() - p).abs() < 1e-15);
        }
    }

    #[test]
    fn instance_json_round_trip() {
        let inst = GbsInstance::new(haar_unitary(3, 4), 0.4, 2).unwrap();
        let back: GbsInstance = serde_json::from_str(&serde_json::to_string(&inst).unwrap()).unwrap();
        assert_eq!(inst, back);
    }
}
