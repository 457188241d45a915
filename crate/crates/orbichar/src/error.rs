use thiserror::Error;

/// Every failure the library can report.
///
/// Variants that "signal a bug" are raised by internal consistency checks
/// whose failure would mean an inconsistent input or an implementation error;
/// they are never expected on valid data.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrbiError {
    #[error("gram matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("gram matrix has odd diagonal entry {value} at index {index}")]
    NotEven { index: usize, value: i64 },
    #[error("gram matrix is not positive definite (leading minor {0} is not positive)")]
    NotPositiveDefinite(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("enumeration would exceed the safety cap of {cap} vectors")]
    BoundTooLarge { cap: usize },
    #[error("lattice is not contained in the claimed superlattice")]
    NotSublattice,
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("matrix does not preserve the gram form")]
    NotIsometry,
    #[error("isometry order exceeds the cap of {0}")]
    InfiniteOrder(u32),
    #[error("index {0} is not a perfect square")]
    NotPerfectSquare(String),
    #[error("cardinality {0} is not an integer")]
    NonIntegerCardinality(String),
    #[error("operation requires prime order, got order {0}")]
    UnsupportedOrder(u32),
    #[error("tau = {0} is not in the upper half-plane")]
    NotUpperHalfPlane(String),
    #[error("sigma does not act with the same order on the lifted lattice: restrict to the index-2 sublattice first")]
    QbarMismatch,
    #[error("twisted trace requested on a coset that is not sigma-fixed")]
    InvalidTwist,
    #[error("vector is not in the projection of the dual lattice")]
    NotProjected,
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("no beta0 satisfies the congruence system")]
    NoSolution,
    #[error("numeric determinations disagree: {0}")]
    InconsistentSamples(String),
    #[error("characters are linearly dependent; the coefficient matrix is not a genuine S-matrix")]
    DegenerateBasis,
    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("parse error at {position}: {message}")]
    Parse { position: String, message: String },
    #[error("invalid input: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, OrbiError>;
