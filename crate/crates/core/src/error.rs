use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural parameter (truncation index, grid size, split point) is invalid.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A series did not settle within its term cap.
    #[error("series failed to converge after {terms} terms (last term magnitude {last_term:e})")]
    Convergence { terms: usize, last_term: f64 },

    /// A quadrature missed its tolerance.
    #[error("quadrature missed tolerance: achieved error estimate {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
