use std::sync::Arc;

use rayon::prelude::*;

use super::basis::{enumerate_basis_with_limit, FockBasis};
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::numeric::{binomial, pairwise, Matrix, C64};

/// Result of a gate that may push amplitude past the photon cutoff.
#[derive(Debug, Clone)]
pub struct GateOutput {
    pub state: StateVector,
    /// Norm of the component discarded because it left the retained basis.
    pub leakage: f64,
}

/// Multiply the amplitude of every basis state `S` by `exp(i phase_of(S))`.
pub fn apply_diagonal_phase<F>(state: &StateVector, phase_of: F) -> StateVector
where
    F: Fn(&[u32]) -> f64 + Sync,
{
    let basis = state.basis();
    let amplitudes = state
        .amplitudes()
        .par_iter()
        .enumerate()
        .map(|(i, a)| a * C64::from_polar(1.0, phase_of(basis.occupation(i))))
        .collect();
    StateVector::from_parts(Arc::clone(basis), amplitudes)
}

/// Apply `op_matrix` to the tensor factor of `target_modes`.
///
/// The matrix is expressed in the graded Fock basis of the target modes at
/// some cutoff `N_op >= N_cut` (so its dimension is `C(T + N_op, T)` for `T`
/// targets). Rows whose photon count would exceed the global cutoff are
/// discarded and their norm is reported as leakage.
pub fn apply_dense_operator(state: &StateVector, op_matrix: &Matrix, target_modes: &[usize]) -> Result<GateOutput> {
    let basis = state.basis();
    let modes = basis.modes();
    let cutoff = basis.cutoff();
    validate_targets(target_modes, modes)?;

    if op_matrix.nrows() != op_matrix.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected square",
            op_matrix.nrows(),
            op_matrix.ncols()
        )));
    }
    let t = target_modes.len();
    let op_cutoff = cutoff_for_dimension(t, op_matrix.nrows()).ok_or_else(|| {
        Error::DimensionMismatch(format!(
            "operator dimension {} is not the size of a {t}-mode truncated Fock basis",
            op_matrix.nrows()
        ))
    })?;
    if op_cutoff < cutoff {
        return Err(Error::DimensionMismatch(format!(
            "operator covers {op_cutoff} photons on the target modes but the state cutoff is {cutoff}"
        )));
    }

    let sub = enumerate_basis_with_limit(t, op_cutoff, usize::MAX)?;
    let rest_modes: Vec<usize> = (0..modes).filter(|m| !target_modes.contains(m)).collect();
    let rest = if rest_modes.is_empty() {
        None
    } else {
        Some(enumerate_basis_with_limit(rest_modes.len(), cutoff, usize::MAX)?)
    };
    let groups = rest.as_ref().map_or(1, |r| r.dimension());

    // sparse columns restricted to the inputs the state can populate
    let columns: Vec<Vec<(usize, C64)>> = (0..sub.prefix_len(cutoff))
        .map(|c| {
            (0..sub.dimension())
                .filter_map(|r| {
                    let v = op_matrix[(r, c)];
                    (v != C64::new(0.0, 0.0)).then_some((r, v))
                })
                .collect()
        })
        .collect();

    let amps = state.amplitudes();
    let per_group: Vec<(Vec<(usize, C64)>, f64)> = (0..groups)
        .into_par_iter()
        .map(|g| {
            let mut occ = vec![0u32; modes];
            let rest_total = match &rest {
                Some(rb) => {
                    let r = rb.occupation(g);
                    for (k, &m) in rest_modes.iter().enumerate() {
                        occ[m] = r[k];
                    }
                    r.iter().map(|&x| x as usize).sum()
                }
                None => 0,
            };
            let cap = cutoff - rest_total;
            let prefix = sub.prefix_len(cap);
            let index_of = |occ: &mut [u32], row: usize| {
                let s = sub.occupation(row);
                let mut total = rest_total;
                for (k, &m) in target_modes.iter().enumerate() {
                    occ[m] = s[k];
                    total += s[k] as usize;
                }
                basis.rank_unchecked(occ, total)
            };

            let mut w = vec![C64::new(0.0, 0.0); sub.dimension()];
            let mut touched = false;
            for (c, col) in columns.iter().enumerate().take(prefix) {
                let a = amps[index_of(&mut occ, c)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                touched = true;
                for &(r, v) in col {
                    w[r] += v * a;
                }
            }
            if !touched {
                return (Vec::new(), 0.0);
            }
            let kept = (0..prefix).map(|r| (index_of(&mut occ, r), w[r])).collect();
            let dropped = w[prefix..].iter().map(|x| x.norm_sqr()).sum::<f64>();
            (kept, dropped)
        })
        .collect();

    let mut out = vec![C64::new(0.0, 0.0); basis.dimension()];
    let mut dropped = Vec::with_capacity(per_group.len());
    for (kept, d) in per_group {
        for (i, v) in kept {
            out[i] = v;
        }
        dropped.push(d);
    }
    Ok(GateOutput {
        state: StateVector::from_parts(Arc::clone(basis), out),
        leakage: pairwise(&dropped).sqrt(),
    })
}

fn validate_targets(targets: &[usize], modes: usize) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::InvalidParameter("no target modes".into()));
    }
    for (i, &m) in targets.iter().enumerate() {
        if m >= modes {
            return Err(Error::InvalidParameter(format!("target mode {m} out of range for {modes} modes")));
        }
        if targets[..i].contains(&m) {
            return Err(Error::InvalidParameter(format!("target mode {m} repeated")));
        }
    }
    Ok(())
}

// Inverse of dim = C(t + c, t) in c.
fn cutoff_for_dimension(t: usize, dim: usize) -> Option<usize> {
    let mut c = 0usize;
    loop {
        let d = binomial((t + c) as u64, t as u64)?;
        match d.cmp(&(dim as u128)) {
            std::cmp::Ordering::Equal => return Some(c),
            std::cmp::Ordering::Greater => return None,
            std::cmp::Ordering::Less => c += 1,
        }
    }
}

/// The sub-basis used for operators on `t` target modes with `cutoff` photons.
pub fn target_basis(t: usize, cutoff: usize) -> Result<Arc<FockBasis>> {
    enumerate_basis_with_limit(t, cutoff, usize::MAX)
}
