use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("zero operator: {0}")]
    ZeroOperator(String),

    #[error("spectral cut threshold {threshold} is not below the top singular value {top}")]
    EmptyCut { threshold: f64, top: f64 },

    #[error("norm cap violated at position {index}: {norm} exceeds {cap}")]
    NormCapViolated { index: usize, norm: f64, cap: f64 },

    #[error("dimension limit: {0}")]
    DimensionLimit(String),

    #[error("input pattern violation: {0}")]
    PatternViolation(String),

    #[error("independence unreachable: {0}")]
    IndependenceUnreachable(String),

    #[error("numerical nullspace empty: {0}")]
    NullspaceEmpty(String),

    #[error("scale limit at this truncation: {0}")]
    ScaleLimit(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("unknown fixture kind: {0}")]
    UnknownFixture(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for conditions that mean "the construction ran out of room at
    /// this truncation" rather than "the input was malformed".
    pub fn is_scale_limit(&self) -> bool {
        matches!(
            self,
            Error::ScaleLimit(_)
                | Error::DimensionLimit(_)
                | Error::IndependenceUnreachable(_)
                | Error::NullspaceEmpty(_)
        )
    }
}
