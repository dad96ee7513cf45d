use serde::{Deserialize, Serialize};

use super::DiagonalHamiltonian;
use crate::error::{Error, Result};
use crate::fock::{enumerate_basis, OccupationVector};

/// `H = N² Σ_{j≤N} n_j + Σ_{j≤N} n_j² + N²(N+2) Σ_{j>N} n_j`, whose eigenvalue
/// `N(N²+1)` is carried only by `|1^N 0^{M-N}⟩`.
pub fn lemma1_hamiltonian(n: usize, m: usize) -> Result<DiagonalHamiltonian> {
    if n == 0 || n > m {
        return Err(Error::InvalidParameter(format!("need 1 <= N <= M, got N = {n}, M = {m}")));
    }
    let n2 = (n * n) as f64;
    let mu = (0..m).map(|j| if j < n { n2 } else { n2 * (n + 2) as f64 }).collect();
    let eta = (0..m).map(|j| if j < n { 1.0 } else { 0.0 }).collect();
    DiagonalHamiltonian::new(eta, mu, None, true)
}

/// The collision-free target `(1,…,1,0,…,0)` with `n` leading photons and its
/// energy `N(N²+1)`.
pub fn lemma1_target(n: usize, m: usize) -> (OccupationVector, i64) {
    let n_i = n as i64;
    (OccupationVector::leading_ones(n, m), n_i * (n_i * n_i + 1))
}

/// Outcome of an exhaustive energy-collision search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    pub target: OccupationVector,
    pub target_energy: f64,
    pub photon_bound: usize,
    pub enumerated: usize,
    /// Other occupation vectors sharing the target energy.
    pub collisions: Vec<OccupationVector>,
    /// Distance to the nearest distinct energy, if any other energy occurs.
    pub gap: Option<f64>,
    pub nearest: Option<OccupationVector>,
}

impl NondegeneracyReport {
    pub fn is_unique(&self) -> bool {
        self.collisions.is_empty()
    }

    /// Turn a degenerate report into an error naming the first collision.
    pub fn into_result(self) -> Result<Self> {
        match self.collisions.first() {
            None => Ok(self),
            Some(c) => Err(Error::DegenerateEnergy {
                target: self.target.clone(),
                colliding: c.clone(),
                energy: self.target_energy,
            }),
        }
    }
}

/// Enumerate every occupation vector with at most `photon_bound` photons and
/// list those whose energy equals that of `target`.
pub fn verify_nondegeneracy(
    h: &DiagonalHamiltonian,
    target: &OccupationVector,
    photon_bound: usize,
) -> Result<NondegeneracyReport> {
    let target_energy = super::energy(target, h)?;
    if target.total_photons() > photon_bound {
        return Err(Error::InvalidParameter(format!(
            "photon bound {photon_bound} below the target's {} photons",
            target.total_photons()
        )));
    }
    let basis = enumerate_basis(h.modes(), photon_bound)?;
    // float spectra compare with a relative tolerance, integer spectra exactly
    let tol = if h.integer_spectrum { 0.0 } else { 1e-9 * target_energy.abs().max(1.0) };
    let mut collisions = Vec::new();
    let mut gap: Option<f64> = None;
    let mut nearest = None;
    for i in 0..basis.dimension() {
        let s = basis.occupation(i);
        if s == target.as_slice() {
            continue;
        }
        let d = (h.energy_of(s) - target_energy).abs();
        if d <= tol {
            collisions.push(OccupationVector::from(s));
        } else if gap.map_or(true, |g| d < g) {
            gap = Some(d);
            nearest = Some(OccupationVector::from(s));
        }
    }
    Ok(NondegeneracyReport {
        target: target.clone(),
        target_energy,
        photon_bound,
        enumerated: basis.dimension(),
        collisions,
        gap,
        nearest,
    })
}

/// Default enumeration bound: `N + 3` photons.
pub fn default_photon_bound(n: usize) -> usize {
    n + 3
}
