use std::sync::Arc;

use rayon::prelude::*;

use super::basis::FockBasis;
use crate::error::{Error, Result};
use crate::numeric::{det_sum, C64};

/// Dense complex amplitudes over a [`FockBasis`].
#[derive(Debug, Clone)]
pub struct StateVector {
    basis: Arc<FockBasis>,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(basis: Arc<FockBasis>, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != basis.dimension() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.dimension()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn zeros(basis: Arc<FockBasis>) -> Self {
        let dim = basis.dimension();
        Self { basis, amplitudes: vec![C64::new(0.0, 0.0); dim] }
    }

    pub fn vacuum(basis: Arc<FockBasis>) -> Self {
        let mut s = Self::zeros(basis);
        s.amplitudes[0] = C64::new(1.0, 0.0);
        s
    }

    /// The normalized Fock state `|occupation>`.
    pub fn basis_state(basis: Arc<FockBasis>, occupation: &[u32]) -> Result<Self> {
        let index = basis.index_of(occupation).ok_or_else(|| {
            Error::InvalidParameter(format!("{occupation:?} is not retained by the basis"))
        })?;
        let mut s = Self::zeros(basis);
        s.amplitudes[index] = C64::new(1.0, 0.0);
        Ok(s)
    }

    /// Build a state from a function of the occupation pattern.
    pub fn from_fn<F>(basis: Arc<FockBasis>, f: F) -> Self
    where
        F: Fn(&[u32]) -> C64 + Sync,
    {
        let amplitudes = (0..basis.dimension())
            .into_par_iter()
            .map(|i| f(basis.occupation(i)))
            .collect();
        Self { basis, amplitudes }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// Amplitude of a pattern; zero if the cutoff drops it.
    pub fn amplitude(&self, occupation: &[u32]) -> C64 {
        self.basis
            .index_of(occupation)
            .map_or(C64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        det_sum(self.amplitudes.len(), |i| self.amplitudes[i].norm_sqr())
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Squared norm restricted to each total-photon sector.
    pub fn sector_norms_sqr(&self) -> Vec<f64> {
        (0..=self.basis.cutoff())
            .map(|n| {
                let r = self.basis.sector_range(n);
                det_sum(r.len(), |k| self.amplitudes[r.start + k].norm_sqr())
            })
            .collect()
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let amplitudes = self.amplitudes.par_iter().map(|a| a * factor).collect();
        Self { basis: Arc::clone(&self.basis), amplitudes }
    }

    /// `self + other`, on a shared basis.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_basis(self, other)?;
        let amplitudes = self
            .amplitudes
            .par_iter()
            .zip(other.amplitudes.par_iter())
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { basis: Arc::clone(&self.basis), amplitudes })
    }

    /// `‖self - other‖`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        check_same_basis(self, other)?;
        Ok(det_sum(self.amplitudes.len(), |i| (self.amplitudes[i] - other.amplitudes[i]).norm_sqr()).sqrt())
    }

    /// Copy the amplitudes onto another basis with the same mode count;
    /// entries the target basis does not retain are dropped.
    pub fn reembed(&self, target: Arc<FockBasis>) -> Result<Self> {
        if target.modes() != self.basis.modes() {
            return Err(Error::DimensionMismatch(format!(
                "cannot re-embed {} modes into {}",
                self.basis.modes(),
                target.modes()
            )));
        }
        let shared = self.basis.prefix_len(target.cutoff()).min(target.prefix_len(self.basis.cutoff()));
        // graded ordering: the shared sectors form identical prefixes
        let mut out = Self::zeros(target);
        out.amplitudes[..shared].copy_from_slice(&self.amplitudes[..shared]);
        Ok(out)
    }

    pub(crate) fn from_parts(basis: Arc<FockBasis>, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(basis.dimension(), amplitudes.len());
        Self { basis, amplitudes }
    }
}

pub(crate) fn check_same_basis(a: &StateVector, b: &StateVector) -> Result<()> {
    let (x, y) = (a.basis(), b.basis());
    if Arc::ptr_eq(x, y) || (x.modes() == y.modes() && x.cutoff() == y.cutoff()) {
        Ok(())
    } else {
        Err(Error::BasisMismatch {
            left_modes: x.modes(),
            left_cutoff: x.cutoff(),
            right_modes: y.modes(),
            right_cutoff: y.cutoff(),
        })
    }
}

/// `<a|b> = Σ conj(a_i) b_i`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<C64> {
    check_same_basis(a, b)?;
    Ok(det_sum(a.amplitudes.len(), |i| a.amplitudes[i].conj() * b.amplitudes[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::enumerate_basis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vacuum_is_normalized() {
        let b = enumerate_basis(3, 2).unwrap();
        let v = StateVector::vacuum(b);
        assert_eq!(inner_product(&v, &v).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn orthogonal_single_photons() {
        let b = enumerate_basis(2, 2).unwrap();
        let x = StateVector::basis_state(b.clone(), &[1, 0]).unwrap();
        let y = StateVector::basis_state(b, &[0, 1]).unwrap();
        assert_eq!(inner_product(&x, &y).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn random_state_self_overlap() {
        let b = enumerate_basis(3, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let raw: Vec<C64> = (0..b.dimension())
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        // direct summation oracle for the norm
        let n: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let v = StateVector::new(b, raw.iter().map(|a| a / n).collect()).unwrap();
        let ip = inner_product(&v, &v).unwrap();
        assert!((ip - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn mismatched_bases_are_rejected() {
        let a = StateVector::vacuum(enumerate_basis(2, 2).unwrap());
        let b = StateVector::vacuum(enumerate_basis(2, 3).unwrap());
        assert!(matches!(inner_product(&a, &b), Err(Error::BasisMismatch { .. })));
    }

    #[test]
    fn reembed_keeps_shared_sectors() {
        let small = enumerate_basis(2, 2).unwrap();
        let big = enumerate_basis(2, 4).unwrap();
        let s = StateVector::basis_state(small.clone(), &[1, 1]).unwrap();
        let up = s.reembed(big).unwrap();
        assert_eq!(up.amplitude(&[1, 1]), C64::new(1.0, 0.0));
        let down = up.reembed(small).unwrap();
        assert_eq!(down.amplitude(&[1, 1]), C64::new(1.0, 0.0));
    }
}
