//! Diagonal Kerr-type Hamiltonians, their energies and spectra, and the
//! non-degenerate target construction with its brute-force verification.

mod lemma1;

use serde::{Deserialize, Serialize};

pub use lemma1::{default_photon_bound, lemma1_hamiltonian, lemma1_target, verify_nondegeneracy, NondegeneracyReport};

use crate::error::{Error, Result};
use crate::fock::{apply_diagonal_phase, OccupationVector, StateVector};
use crate::numeric::pairwise;

/// `H = Σ η_i n_i² + Σ μ_i n_i + Σ_{i,j} J_ij n_i n_j`, diagonal in the Fock basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalHamiltonian {
    pub eta: Vec<f64>,
    pub mu: Vec<f64>,
    /// Symmetric cross-Kerr matrix, summed over all ordered pairs `(i, j)`.
    pub cross: Option<Vec<Vec<f64>>>,
    pub integer_spectrum: bool,
}

impl DiagonalHamiltonian {
    pub fn new(eta: Vec<f64>, mu: Vec<f64>, cross: Option<Vec<Vec<f64>>>, integer_spectrum: bool) -> Result<Self> {
        let h = Self { eta, mu, cross, integer_spectrum };
        h.validate()?;
        Ok(h)
    }

    /// Purely linear Hamiltonian `Σ μ_i n_i`.
    pub fn linear(mu: Vec<f64>) -> Result<Self> {
        let integer = mu.iter().all(|&m| is_nonneg_integer(m));
        Self::new(vec![0.0; mu.len()], mu, None, integer)
    }

    pub fn modes(&self) -> usize {
        self.mu.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.mu.len();
        if self.eta.len() != m {
            return Err(Error::DimensionMismatch(format!("{} eta coefficients for {m} modes", self.eta.len())));
        }
        let mut all: Vec<f64> = self.eta.iter().chain(&self.mu).copied().collect();
        if let Some(j) = &self.cross {
            if j.len() != m || j.iter().any(|row| row.len() != m) {
                return Err(Error::DimensionMismatch(format!("cross-Kerr matrix is not {m}x{m}")));
            }
            for a in 0..m {
                for b in 0..a {
                    if j[a][b] != j[b][a] {
                        return Err(Error::NotSymmetric { deviation: (j[a][b] - j[b][a]).abs() });
                    }
                }
            }
            all.extend(j.iter().flatten());
        }
        if all.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite Hamiltonian coefficient".into()));
        }
        if self.integer_spectrum && !all.iter().all(|&c| is_nonneg_integer(c)) {
            return Err(Error::InvalidParameter(
                "integer_spectrum requires non-negative integer coefficients".into(),
            ));
        }
        Ok(())
    }

    /// Check the coefficient magnitudes against a caller-supplied bound.
    pub fn check_coefficient_bound(&self, bound: f64) -> Result<()> {
        let worst = self
            .eta
            .iter()
            .chain(&self.mu)
            .chain(self.cross.iter().flatten().flatten())
            .fold(0.0f64, |acc, c| acc.max(c.abs()));
        if worst > bound {
            return Err(Error::InvalidParameter(format!("coefficient {worst} exceeds bound {bound}")));
        }
        Ok(())
    }

    /// Energy of a Fock state; panics in debug builds on length mismatch.
    pub(crate) fn energy_of(&self, s: &[u32]) -> f64 {
        debug_assert_eq!(s.len(), self.modes());
        if self.integer_spectrum {
            return self.integer_energy_of(s) as f64;
        }
        let mut e = 0.0;
        for (i, &n) in s.iter().enumerate() {
            let n = n as f64;
            e += self.eta[i] * n * n + self.mu[i] * n;
        }
        if let Some(j) = &self.cross {
            for (a, &na) in s.iter().enumerate() {
                if na == 0 {
                    continue;
                }
                for (b, &nb) in s.iter().enumerate() {
                    e += j[a][b] * na as f64 * nb as f64;
                }
            }
        }
        e
    }

    fn integer_energy_of(&self, s: &[u32]) -> i64 {
        let mut e: i64 = 0;
        for (i, &n) in s.iter().enumerate() {
            let n = n as i64;
            e += self.eta[i] as i64 * n * n + self.mu[i] as i64 * n;
        }
        if let Some(j) = &self.cross {
            for (a, &na) in s.iter().enumerate() {
                for (b, &nb) in s.iter().enumerate() {
                    e += j[a][b] as i64 * na as i64 * nb as i64;
                }
            }
        }
        e
    }

    /// Exact integer energy; `None` unless the spectrum is flagged integer.
    pub fn integer_energy(&self, s: &OccupationVector) -> Result<Option<i64>> {
        self.check_len(s.as_slice())?;
        Ok(self.integer_spectrum.then(|| self.integer_energy_of(s.as_slice())))
    }

    fn check_len(&self, s: &[u32]) -> Result<()> {
        if s.len() != self.modes() {
            return Err(Error::DimensionMismatch(format!(
                "occupation of length {} for a {}-mode Hamiltonian",
                s.len(),
                self.modes()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let h: Self = serde_json::from_str(text)?;
        h.validate()?;
        Ok(h)
    }
}

fn is_nonneg_integer(c: f64) -> bool {
    c >= 0.0 && c.fract() == 0.0 && c < 2f64.powi(40)
}

/// `E(S) = Σ η_i s_i² + Σ μ_i s_i + Σ_{i,j} J_ij s_i s_j`.
pub fn energy(s: &OccupationVector, h: &DiagonalHamiltonian) -> Result<f64> {
    h.check_len(s.as_slice())?;
    Ok(h.energy_of(s.as_slice()))
}

/// `e^{i t H}` applied to `state`.
pub fn kerr_evolve(state: &StateVector, h: &DiagonalHamiltonian, t: f64) -> Result<StateVector> {
    if h.modes() != state.basis().modes() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode Hamiltonian on a {}-mode state",
            h.modes(),
            state.basis().modes()
        )));
    }
    if t == 0.0 {
        return Ok(state.clone());
    }
    Ok(apply_diagonal_phase(state, |s| t * h.energy_of(s)))
}

/// Distribution of a state's weight over the distinct energies of `H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySpectrum {
    /// Distinct energies realised on the truncated basis, ascending.
    pub theta: Vec<f64>,
    /// `weights[i]` is the probability of energy `theta[i]`.
    pub weights: Vec<f64>,
    /// `1 - Σ weights`: the mass outside the truncated space.
    pub deficit: f64,
}

impl EnergySpectrum {
    pub fn weight(&self, energy: f64) -> f64 {
        match self.theta.binary_search_by(|e| e.total_cmp(&energy)) {
            Ok(i) => self.weights[i],
            Err(_) => 0.0,
        }
    }

    pub fn total_weight(&self) -> f64 {
        pairwise(&self.weights)
    }

    /// Bins carrying non-zero weight.
    pub fn support(&self) -> Vec<(f64, f64)> {
        self.theta.iter().zip(&self.weights).filter(|(_, &p)| p > 0.0).map(|(&e, &p)| (e, p)).collect()
    }

    pub fn max_energy(&self) -> Option<f64> {
        self.theta.last().copied()
    }

    /// `Σ_j p_j e^{i j t}`.
    pub fn characteristic(&self, t: f64) -> crate::numeric::C64 {
        let terms: Vec<_> = self
            .theta
            .iter()
            .zip(&self.weights)
            .map(|(&e, &p)| crate::numeric::C64::from_polar(p, e * t))
            .collect();
        pairwise(&terms)
    }
}

/// Bin `|amplitude|²` by energy. Bins are keyed by exact energy values, which
/// is lossless for integer spectra.
pub fn spectrum(state: &StateVector, h: &DiagonalHamiltonian) -> Result<EnergySpectrum> {
    if h.modes() != state.basis().modes() {
        return Err(Error::DimensionMismatch("Hamiltonian and state mode counts differ".into()));
    }
    let basis = state.basis();
    let mut pairs: Vec<(f64, f64)> = (0..basis.dimension())
        .map(|i| (h.energy_of(basis.occupation(i)), state.amplitudes()[i].norm_sqr()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut theta = Vec::new();
    let mut weights = Vec::new();
    let mut start = 0;
    while start < pairs.len() {
        let e = pairs[start].0;
        let end = start + pairs[start..].iter().take_while(|p| p.0 == e).count();
        let bin: Vec<f64> = pairs[start..end].iter().map(|p| p.1).collect();
        theta.push(e);
        weights.push(pairwise(&bin));
        start = end;
    }
    let deficit = 1.0 - pairwise(&weights);
    Ok(EnergySpectrum { theta, weights, deficit })
}
