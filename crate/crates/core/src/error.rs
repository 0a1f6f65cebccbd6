use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("linear system has no solution")]
    NoSolution,
    #[error("selected submatrix is singular")]
    Singular,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("code dimension {dim} exceeds the enumeration limit {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("operation undefined for the zero code")]
    ZeroCode,
    #[error("index tuples have overlapping supports")]
    OverlappingSupport,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("parameter mismatch: {0}")]
    ParamMismatch(String),
    #[error("star product of {0} is not covered by any known case")]
    UndefinedCase(String),
    #[error("unsupported storage/retrieval pair: {0}")]
    UnsupportedPair(String),
    #[error("storage and retrieval codes give a full-space star product, the PIR rate is zero")]
    ZeroRate,
    #[error("no schedule found: {0}")]
    ScheduleNotFound(String),
    #[error("incomplete recovery: {0}")]
    Incomplete(String),
}

pub type Result<T> = std::result::Result<T, Error>;
