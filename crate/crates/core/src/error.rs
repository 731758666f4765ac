use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Input data violates a structural invariant (e.g. not a valid p-vector).
    #[error("inconsistent input: {0}")]
    Inconsistent(String),

    /// Two independent computation paths disagree beyond tolerance.
    #[error("numerical consistency failure: {what} (discrepancy {discrepancy:e}, tolerance {tolerance:e})")]
    Consistency {
        what: String,
        discrepancy: f64,
        tolerance: f64,
    },

    /// Checked integer arithmetic overflowed.
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    /// Text input could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
