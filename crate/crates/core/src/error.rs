use num_bigint::BigInt;
use thiserror::Error;

/// Errors raised by the lattice kernel, the solvers, the oracles and the reductions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("basis is empty")]
    EmptyBasis,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis vectors are linearly dependent")]
    DependentVectors,

    #[error("vector is not a member of the lattice")]
    NotMember,

    #[error("zero vector is not allowed here")]
    ZeroVector,

    #[error("enumeration budget of {limit} nodes exceeded")]
    BudgetExceeded { limit: u64 },

    #[error("rank {rank} exceeds the configured cap of {cap}")]
    RankCap { rank: usize, cap: usize },

    #[error("operation needs rank at least {needed}, lattice has rank {rank}")]
    RankTooSmall { needed: usize, rank: usize },

    #[error("{0} is not prime")]
    NotPrime(BigInt),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("oracle call in rank {rank} exceeds the dimension limit {limit}")]
    DimensionViolation { rank: usize, limit: usize },

    #[error("no oracle output passed validation")]
    NoValidCandidate,

    #[error("invalid estimation bracket: {0}")]
    BracketInvalid(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("oracle does not support exact evaluation")]
    ExactModeUnsupported,
}

pub type Result<T> = std::result::Result<T, Error>;
