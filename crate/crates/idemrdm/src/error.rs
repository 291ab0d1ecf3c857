//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("statistics mismatch")]
    StatisticsMismatch,
    #[error("orbital list is empty")]
    EmptyOrbitals,
    #[error("list length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid occupation state: {0}")]
    InvalidOccupation(String),
    #[error("matrix order {n} exceeds the limit {limit} for this kernel")]
    OrderTooLarge { n: usize, limit: usize },
    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFiniteEntry(usize, usize),
    #[error("matrix entry count {got} does not match order {n} squared")]
    BadMatrixShape { n: usize, got: usize },
    #[error("dense tensor of {dim}^{slots} amplitudes exceeds the size guard")]
    SizeGuard { dim: usize, slots: usize },
    #[error("orbitals are linearly dependent; antisymmetrization vanishes")]
    DependentOrbitals,
    #[error("grade {k} exceeds tensor rank {rank}")]
    GradeExceedsRank { k: usize, rank: usize },
    #[error("subsystem grade {n} exceeds the particle count {total}")]
    SubsystemTooLarge { n: usize, total: usize },
    #[error("oracle scale guard exceeded: {0}")]
    ScaleGuard(String),
    #[error("invalid bipartition: {0}")]
    BadBipartition(String),
    #[error("state norm {0} deviates from 1 beyond the allowed 1e-8")]
    NotNormalized(f64),
    #[error("mixture weights must be positive and sum to 1 (got sum {0})")]
    BadWeights(f64),
    #[error("zero state cannot be normalized or traced")]
    ZeroState,
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("eigenvalue {0:.3e} is below -1e-8; not a valid density matrix")]
    NegativeEigenvalue(f64),
    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("state file: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
