use thiserror::Error;

use crate::fock::OccupationVector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis dimension {dimension} for {modes} modes at cutoff {cutoff} exceeds the limit of {limit}")]
    BasisTooLarge {
        modes: usize,
        cutoff: usize,
        dimension: u128,
        limit: usize,
    },

    #[error("states live on different bases ({left_modes} modes/cutoff {left_cutoff} vs {right_modes} modes/cutoff {right_cutoff})")]
    BasisMismatch {
        left_modes: usize,
        left_cutoff: usize,
        right_modes: usize,
        right_cutoff: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not unitary (max deviation {deviation:.3e}, tolerance {tolerance:.1e})")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("matrix is not symmetric (max deviation {deviation:.3e})")]
    NotSymmetric { deviation: f64 },

    #[error("cutoff {cutoff} leaves tail mass {tail:.3e} above the threshold {threshold:.1e}")]
    CutoffTooSmall {
        cutoff: usize,
        tail: f64,
        threshold: f64,
    },

    #[error("hafnian of a {size}x{size} matrix exceeds the supported size {limit}")]
    HafnianTooLarge { size: usize, limit: usize },

    #[error("outcome {0} has a collision (some mode holds more than one photon)")]
    CollisionOutcome(OccupationVector),

    #[error("energy {energy} of {target} is degenerate with {colliding}")]
    DegenerateEnergy {
        target: OccupationVector,
        colliding: OccupationVector,
        energy: f64,
    },

    #[error("target energy {j_star} lies outside the DFT range [0, {j_max})")]
    TargetOutOfRange { j_star: i64, j_max: usize },

    #[error("ill-conditioned inversion: {0}")]
    IllConditioned(String),

    #[error("operator does not meet the Hadamard-test preconditions: {0}")]
    InvalidOperator(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
