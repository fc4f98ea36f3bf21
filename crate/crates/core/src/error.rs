use thiserror::Error;

use crate::model::Model;

/// Errors raised by the spectral library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("model mismatch: expected {expected:?}, got {found:?}")]
    ModelMismatch { expected: Model, found: Model },

    #[error("series diverges: |c_{index}| exceeds 1e300")]
    DivergingSeries { index: usize },

    #[error("x = {x} is outside the domain x > 0")]
    Domain { x: f64 },

    #[error("x = {x} lies outside the convergence disk of a non-terminating series")]
    OutsideConvergence { x: f64 },

    #[error("sample point {x} must lie in [{lo}, {hi}]")]
    PointOutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("r = {r} coincides with the metric singularity r = beta")]
    SingularPoint { r: f64 },

    #[error("negative discriminant {discriminant}")]
    NegativeDiscriminant { discriminant: f64 },

    #[error("no level available: {0}")]
    LevelMissing(String),

    #[error("grid invalid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("root polishing failed: {0}")]
    RootPolish(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
