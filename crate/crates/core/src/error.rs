use thiserror::Error;

/// Errors raised by the density, weighting, estimation and clustering layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input {0}")]
    NonFiniteInput(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("invalid mixture: {0}")]
    InvalidMixture(&'static str),
    #[error("mean undefined for Student-t component with dof {0} <= 1")]
    MeanUndefined(f64),
    #[error("samples per proposal must be at least 1")]
    ZeroSamplesPerProposal,
    #[error("{proposals} proposals cannot be split into {subsets} equal subsets")]
    IndivisiblePartition { proposals: usize, subsets: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(&'static str),
    #[error("proposal mixture density is zero at x = {0}")]
    ZeroDensity(f64),
    #[error("degenerate weight vector")]
    DegenerateWeights,
    #[error("normalizing constant must be positive, got {0}")]
    NonPositiveNormalizer(f64),
    #[error("candidate set is empty")]
    EmptyCandidates,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
