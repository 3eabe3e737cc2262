use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scope mismatch: {0}")]
    ScopeMismatch(String),

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("table arity {0} exceeds the supported maximum of {1}")]
    TableTooLarge(usize, usize),

    #[error("enumeration over {0} variables exceeds the supported maximum of {1}")]
    EnumerationTooLarge(usize, usize),

    #[error("no feasible assignment exists")]
    Infeasible,

    #[error("non-finite value during {context} (index {index})")]
    NonFinite { context: &'static str, index: usize },

    #[error("training diverged at step {0}")]
    Diverged(usize),

    #[error("degenerate normalization: upper reference must exceed the minimum")]
    DegenerateNormalization,

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
