//! Truncated multimode Fock space.
//!
//! All states live on a [`FockBasis`] holding every occupation pattern of `M`
//! modes with at most `N_cut` photons in total, ordered by total photon number
//! and then lexicographically (ascending) within each photon-number sector.
//! The ordering is part of the dump format and never changes.

mod basis;
mod dump;
mod gate;
mod state;

pub use basis::{enumerate_basis, enumerate_basis_with_limit, FockBasis, OccupationVector, DEFAULT_MAX_DIMENSION};
pub use dump::{StateDump, DUMP_THRESHOLD};
pub use gate::{apply_dense_operator, apply_diagonal_phase, target_basis, GateOutput};
pub use state::{inner_product, StateVector};
