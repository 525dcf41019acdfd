use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{field} must be strictly positive (got {value})")]
    Domain { field: &'static str, value: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("missing required key(s): {0}; required keys are lambda, lambda_p, L_p, Omega")]
    MissingKeys(String),

    #[error("singular configuration: {0}")]
    Singular(String),

    #[error("numerical inconsistency: {0}")]
    Numerical(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("model pole: {0}")]
    Pole(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(field: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain { field, value })
    }
}
