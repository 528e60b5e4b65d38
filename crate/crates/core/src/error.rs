use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient data: {len} samples, at least {min} required")]
    InsufficientData { len: usize, min: usize },

    #[error("xs and fs differ in length ({xs} vs {fs})")]
    LengthMismatch { xs: usize, fs: usize },

    #[error("non-finite value at sample {index}")]
    NonFinite { index: usize },

    #[error("x decreases at sample {index} ({prev} > {next})")]
    Decreasing { index: usize, prev: f64, next: f64 },

    #[error("sample x range is degenerate (x_min = x_max = {0})")]
    DegenerateRange(f64),

    #[error("basis dimension n = {n} outside 1..={max}")]
    InvalidDimension { n: usize, max: usize },

    #[error("basis index {index} exceeds available range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. } | Error::DegenerateDistribution(_)
        )
    }
}
