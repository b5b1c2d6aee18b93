use thiserror::Error;

use crate::quadrature::QuadError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the interval on which the operation is defined.
    #[error("{what} = {value} is outside the valid range {valid}")]
    Domain {
        what: &'static str,
        value: f64,
        valid: &'static str,
    },

    #[error("{what} = {value} must be an even integer")]
    Parity { what: &'static str, value: u64 },

    #[error("range of {requested} integers exceeds the segment capacity {cap}")]
    Capacity { requested: u64, cap: u64 },

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("invalid term manifest: {0}")]
    Manifest(String),

    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

pub type Result<T> = std::result::Result<T, Error>;
