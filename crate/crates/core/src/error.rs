use thiserror::Error;

/// Errors produced by the model, oracle and sweep layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("covariance matrix is not physical: {0}")]
    Physicality(String),

    #[error("Fock truncation too small: tail mass {tail:.3e} exceeds tolerance, need n_max >= {required_n_max}")]
    Truncation { tail: f64, required_n_max: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { field: field.into(), reason: reason.into() }
    }

    /// Process exit code for the CLI contract: 1 for configuration problems, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Domain(_) => 1,
            _ => 2,
        }
    }
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
