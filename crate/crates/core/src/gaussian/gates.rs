use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::clements::{clements_decompose, InterferometerDecomposition, Rotation};
use crate::error::{Error, Result};
use crate::fock::{apply_dense_operator, apply_diagonal_phase, target_basis, GateOutput, StateVector};
use crate::numeric::{Matrix, C64};

/// Initial number of Fock levels kept above the state's cutoff when a gate
/// matrix is built; the padding doubles until the rows beyond it are empty.
pub const GENERATOR_PADDING: usize = 32;

const PADDING_LIMIT: usize = 4096;
// mass of the top padding rows below which the tail is considered exhausted
const TAIL_MASS: f64 = 1e-32;

/// Single-mode Gaussian gates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingleModeGate {
    /// `S_r = exp(r (a^2 - a^†2) / 2)`
    Squeeze(f64),
    /// `D_α = exp(α a^† - α* a)`
    Displace(C64),
    /// `exp(i θ n)`
    Phase(f64),
}

impl SingleModeGate {
    pub fn is_identity(&self) -> bool {
        match *self {
            Self::Squeeze(r) => r == 0.0,
            Self::Displace(a) => a == C64::new(0.0, 0.0),
            Self::Phase(t) => t == 0.0,
        }
    }
}

/// Fock-basis matrix of a single-mode gate: the matrix exponential of its
/// generator truncated to `cutoff + 1` levels.
pub fn single_mode_gate_matrix(gate: SingleModeGate, cutoff: usize) -> Matrix {
    let dim = cutoff + 1;
    let zero = C64::new(0.0, 0.0);
    if let SingleModeGate::Phase(theta) = gate {
        return Matrix::from_fn(dim, dim, |r, c| if r == c { C64::from_polar(1.0, theta * r as f64) } else { zero });
    }
    // annihilation operator: a[n-1, n] = sqrt(n)
    let a = Matrix::from_fn(dim, dim, |r, c| if c == r + 1 { C64::new((c as f64).sqrt(), 0.0) } else { zero });
    let ad = a.adjoint();
    let generator = match gate {
        SingleModeGate::Squeeze(r) => (&a * &a - &ad * &ad) * C64::new(r / 2.0, 0.0),
        SingleModeGate::Displace(alpha) => &ad * alpha - &a * alpha.conj(),
        SingleModeGate::Phase(_) => unreachable!(),
    };
    generator.exp()
}

/// Exact Fock matrix elements `⟨m|G|n⟩` for `m, n <= levels`, from the
/// standard three-term recurrences. Unlike [`single_mode_gate_matrix`] these
/// are the entries of the untruncated operator.
pub fn gate_matrix_elements(gate: SingleModeGate, levels: usize) -> Matrix {
    let dim = levels + 1;
    let zero = C64::new(0.0, 0.0);
    let sq: Vec<f64> = (0..=dim).map(|n| (n as f64).sqrt()).collect();
    let mut m = Matrix::from_element(dim, dim, zero);
    match gate {
        SingleModeGate::Phase(theta) => {
            for n in 0..dim {
                m[(n, n)] = C64::from_polar(1.0, theta * n as f64);
            }
        }
        SingleModeGate::Displace(alpha) => {
            m[(0, 0)] = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
            for r in 1..dim {
                m[(r, 0)] = m[(r - 1, 0)] * alpha / sq[r];
            }
            for c in 1..dim {
                for r in 0..dim {
                    let up = if r > 0 { m[(r - 1, c - 1)] * sq[r] } else { zero };
                    m[(r, c)] = (up - alpha.conj() * m[(r, c - 1)]) / sq[c];
                }
            }
        }
        SingleModeGate::Squeeze(r) => {
            let (sech, tanh) = (1.0 / r.cosh(), r.tanh());
            m[(0, 0)] = C64::new(sech.sqrt(), 0.0);
            for row in (2..dim).step_by(2) {
                m[(row, 0)] = m[(row - 2, 0)] * (-tanh * ((row - 1) as f64 / row as f64).sqrt());
            }
            for c in 1..dim {
                for row in 0..dim {
                    let diag = if row > 0 { m[(row - 1, c - 1)] * (sech * sq[row]) } else { zero };
                    let side = if c > 1 { m[(row, c - 2)] * (tanh * sq[c - 1]) } else { zero };
                    m[(row, c)] = (diag + side) / sq[c];
                }
            }
        }
    }
    m
}

/// Apply a single-mode gate to `mode`. Rows of the gate matrix above the
/// cutoff are kept long enough to account for all of the leaked norm.
pub fn apply_single_mode(state: &StateVector, gate: SingleModeGate, mode: usize) -> Result<GateOutput> {
    if mode >= state.basis().modes() {
        return Err(Error::InvalidParameter(format!("mode {mode} out of range")));
    }
    if gate.is_identity() {
        return Ok(GateOutput { state: state.clone(), leakage: 0.0 });
    }
    if let SingleModeGate::Phase(theta) = gate {
        return Ok(GateOutput { state: apply_diagonal_phase(state, |o| theta * o[mode] as f64), leakage: 0.0 });
    }
    let op = padded_gate_matrix(gate, state.basis().cutoff());
    apply_dense_operator(state, &op, &[mode])
}

/// Exact gate matrix on `cutoff + pad` levels, with the padding doubled until
/// the top [`GENERATOR_PADDING`] rows of every column `<= cutoff` carry less
/// than `1e-32` of mass. The discarded rows then carry the leaked norm.
/// Results are memoised per `(gate, cutoff)`.
pub fn padded_gate_matrix(gate: SingleModeGate, cutoff: usize) -> Arc<Matrix> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64, u64, usize), Arc<Matrix>>>> = OnceLock::new();
    let key = match gate {
        SingleModeGate::Squeeze(r) => (0, r.to_bits(), 0, cutoff),
        SingleModeGate::Displace(a) => (1, a.re.to_bits(), a.im.to_bits(), cutoff),
        SingleModeGate::Phase(t) => (2, t.to_bits(), 0, cutoff),
    };
    let cache = CACHE.get_or_init(Default::default);
    if let Some(m) = cache.lock().expect("gate cache poisoned").get(&key) {
        return Arc::clone(m);
    }
    let mut pad = GENERATOR_PADDING;
    let m = loop {
        let levels = cutoff + pad;
        let m = gate_matrix_elements(gate, levels);
        let top = (levels + 1 - GENERATOR_PADDING..=levels)
            .flat_map(|r| (0..=cutoff).map(move |c| (r, c)))
            .map(|ix| m[ix].norm_sqr())
            .fold(0.0f64, f64::max);
        if top < TAIL_MASS || pad >= PADDING_LIMIT {
            break m;
        }
        pad *= 2;
    };
    let m = Arc::new(m);
    cache.lock().expect("gate cache poisoned").insert(key, Arc::clone(&m));
    m
}

/// Beamsplitter block `exp(θ (e^{iφ} a_i^† a_j - e^{-iφ} a_j^† a_i))` acting on
/// mode operators, in `(i, j)` order.
pub fn beamsplitter_block(theta: f64, phi: f64) -> [[C64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [
        [C64::new(c, 0.0), C64::from_polar(s, phi)],
        [-C64::from_polar(s, -phi), C64::new(c, 0.0)],
    ]
}

/// Fock representation of a two-mode linear-optical block `w` (which maps
/// `a_k^† -> Σ_l w[l][k] a_l^†`) on the two-mode basis truncated at `cutoff`.
/// Photon number is conserved, so every column lies inside the basis.
pub fn two_mode_fock_matrix(w: &[[C64; 2]; 2], cutoff: usize) -> Matrix {
    let sub = target_basis(2, cutoff).expect("two-mode basis is small");
    let dim = sub.dimension();
    let mut out = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let occ = sub.occupation(col);
        let (p, q) = (occ[0] as usize, occ[1] as usize);
        // v[k] is the amplitude of |k, n-k> within the current sector n
        let mut v = vec![C64::new(1.0, 0.0)];
        for step in 1..=q {
            v = create(&v, w[0][1], w[1][1], step);
        }
        for step in 1..=p {
            v = create(&v, w[0][0], w[1][0], step);
        }
        let n = p + q;
        for (k, amp) in v.into_iter().enumerate() {
            let row = sub.index_of(&[k as u32, (n - k) as u32]).expect("sector retained");
            out[(row, col)] = amp;
        }
    }
    out
}

// (x a_0^† + y a_1^†) / sqrt(step) on a sector vector.
fn create(v: &[C64], x: C64, y: C64, step: usize) -> Vec<C64> {
    let n = v.len() - 1;
    let norm = 1.0 / (step as f64).sqrt();
    let mut u = vec![C64::new(0.0, 0.0); n + 2];
    for (k, &a) in v.iter().enumerate() {
        u[k + 1] += x * a * ((k + 1) as f64).sqrt() * norm;
        u[k] += y * a * ((n - k + 1) as f64).sqrt() * norm;
    }
    u
}

/// Apply a two-mode linear-optical block to modes `(i, j)`.
pub fn apply_two_mode_block(state: &StateVector, w: &[[C64; 2]; 2], modes: (usize, usize)) -> Result<StateVector> {
    let op = two_mode_fock_matrix(w, state.basis().cutoff());
    Ok(apply_dense_operator(state, &op, &[modes.0, modes.1])?.state)
}

/// Apply a linear interferometer `U` (mode transfer matrix, column `j` is the
/// image of a photon in mode `j`).
pub fn apply_interferometer(state: &StateVector, u: &Matrix) -> Result<StateVector> {
    let modes = state.basis().modes();
    if u.nrows() != modes || u.ncols() != modes {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} interferometer on a {modes}-mode state",
            u.nrows(),
            u.ncols()
        )));
    }
    apply_decomposition(state, &clements_decompose(u)?)
}

/// Apply a precomputed rectangular-mesh decomposition.
pub fn apply_decomposition(state: &StateVector, d: &InterferometerDecomposition) -> Result<StateVector> {
    if d.size != state.basis().modes() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode decomposition on a {}-mode state",
            d.size,
            state.basis().modes()
        )));
    }
    let mut s = state.clone();
    for rot in &d.rotations {
        s = apply_rotation(&s, rot)?;
    }
    let phases = d.phases.clone();
    if phases.iter().any(|&p| p != 0.0) {
        s = apply_diagonal_phase(&s, |o| o.iter().zip(&phases).map(|(&n, &p)| n as f64 * p).sum());
    }
    Ok(s)
}

fn apply_rotation(state: &StateVector, rot: &Rotation) -> Result<StateVector> {
    let (m, _) = rot.modes;
    if rot.theta == 0.0 {
        if rot.phi == 0.0 {
            return Ok(state.clone());
        }
        let phi = rot.phi;
        return Ok(apply_diagonal_phase(state, |o| phi * o[m] as f64));
    }
    apply_two_mode_block(state, &rot.block(), rot.modes)
}
