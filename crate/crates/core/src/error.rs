use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular to working precision: |R[{index}][{index}]| = {value:e}")]
    Singular { index: usize, value: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported size {n} (maximum {max})")]
    UnsupportedSize { n: usize, max: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("out of range: {0}")]
    Range(String),

    #[error("did not halt within {limit}; final off-diagonal profile {profile:?}")]
    NonHalting { limit: f64, profile: Vec<f64> },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("Newton iteration failed to converge; residual history {history:?}")]
    NewtonFailed { history: Vec<f64> },

    #[error("representation inconsistency: {0}")]
    Representation(String),

    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Singular { .. } => "singular",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Domain(_) => "domain",
            Error::UnsupportedSize { .. } => "unsupported_size",
            Error::Degenerate(_) => "degenerate",
            Error::Range(_) => "range",
            Error::NonHalting { .. } => "non_halting",
            Error::DegenerateSample(_) => "degenerate_sample",
            Error::NewtonFailed { .. } => "newton_failed",
            Error::Representation(_) => "representation",
            Error::Config { .. } => "config",
            Error::Shape(_) => "shape",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
