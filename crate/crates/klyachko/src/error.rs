//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the geometric and linear-algebra layers.
///
/// Variants are grouped by the kind of failure so the CLI can map them to
/// exit codes: structural/mathematical precondition failures vs. internal
/// invariant violations (which indicate a bug, never bad input).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("fan must be smooth and complete: {0}")]
    NotSmoothComplete(String),

    #[error("divisor is not ample")]
    NotAmple,

    #[error("invalid ray index {0}")]
    InvalidRay(usize),

    #[error("invalid filtration family: {0}")]
    InvalidFiltration(String),

    #[error("subspace must be proper and nonzero")]
    ImproperSubspace,

    #[error("rank {rank} out of admissible range 2..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("cone {0:?} is not a face of any maximal cone")]
    ConeNotInFan(Vec<usize>),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
