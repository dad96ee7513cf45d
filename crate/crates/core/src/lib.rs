//! Truncated Fock-space laboratory for Gaussian quantum optics with a limited
//! number of Kerr-type non-linear layers.
//!
//! The crate is organised bottom-up:
//!
//! * [`fock`]: basis enumeration, state vectors and generic gate application
//!   on a total-photon-truncated multimode Fock space.
//! * [`gaussian`]: squeezers, displacements, interferometers (rectangular
//!   mesh decomposition) and Haar sampling.
//! * [`kerr`]: diagonal Kerr Hamiltonians, energy spectra and the
//!   non-degenerate target Hamiltonian with its brute-force check.
//! * [`gbs`]: Hafnian-based GBS probabilities and squeezed-light photon
//!   statistics (pair distribution, Chernoff tail bounds).
//! * [`reduction`]: amplitude time series and DFT reconstruction of a single
//!   GBS outcome probability.
//! * [`hadamard`]: the continuous-variable Hadamard test built from cat-state
//!   ancillas and controlled-phase gadgets.

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod gbs;
pub mod hadamard;
pub mod kerr;
pub mod numeric;
pub mod reduction;

pub use error::{Error, Result};
pub use fock::{FockBasis, GateOutput, OccupationVector, StateVector};
pub use gaussian::{GaussianSpec, InterferometerDecomposition};
pub use gbs::{GbsInstance, SymmetricComplexMatrix};
pub use hadamard::{CatPair, HadamardInstance, NumberConservingOp};
pub use kerr::{DiagonalHamiltonian, EnergySpectrum};
pub use numeric::{Matrix, C64};
pub use reduction::{AmplitudeSeries, Gpnl1Instance};
