use thiserror::Error;

/// Errors raised anywhere in the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch { context: &'static str, expected: usize, got: usize },

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("non-finite value in {what} at iteration {iteration}")]
    NonFinite { what: &'static str, iteration: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{what} did not converge after {iterations} iterations (last estimate {last_estimate:e})")]
    NotConverged { what: &'static str, iterations: usize, last_estimate: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { context, expected, got })
    }
}
