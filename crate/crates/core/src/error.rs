use thiserror::Error;

/// Errors raised by the arithmetic, generator and extractor layers.
///
/// Parameter-search infeasibility is not an error; see [`crate::params::Outcome`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported transform length {0}: {1}")]
    UnsupportedLength(usize, &'static str),

    #[error("length mismatch: {what} has {actual} entries, expected {expected}")]
    Length {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("operands belong to different fields: GF(2^{left_s}) k={left_k} vs GF(2^{right_s}) k={right_k}")]
    IncompatibleField {
        left_s: usize,
        left_k: usize,
        right_s: usize,
        right_k: usize,
    },

    #[error("no irreducible trinomial known for degree {0}")]
    UnsupportedDegree(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("malformed trinomial table line {line}: {reason}")]
    TableFormat { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
