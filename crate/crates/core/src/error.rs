use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{value} is out of range for {what}: {bound}")]
    OutOfRange {
        what: &'static str,
        value: String,
        bound: String,
    },

    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u32),

    #[error("matrix is not a cyclic difference matrix: {0}")]
    NotCdm(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(
    what: &'static str,
    value: impl ToString,
    bound: impl ToString,
) -> Error {
    Error::OutOfRange {
        what,
        value: value.to_string(),
        bound: bound.to_string(),
    }
}
