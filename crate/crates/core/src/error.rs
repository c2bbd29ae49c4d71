use thiserror::Error;

/// Errors produced by the solvers, samplers, harness and file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("order m={m} is invalid for degree l={ell}")]
    InvalidOrder { ell: usize, m: usize },

    #[error("operation requires the 2-sphere (d=3), got d={0}")]
    UnsupportedDimension(usize),

    #[error("ambient dimension must be at least 3, got d={0}")]
    InvalidDimension(usize),

    #[error("harmonic dimension h({ell},{d}) overflows the platform integer range")]
    Overflow { ell: usize, d: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("factor table does not match the requested step: {0}")]
    FactorMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("rate fit failed: {0}")]
    Fit(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
