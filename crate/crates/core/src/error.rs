use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-domain input.
    #[error("invalid input: {0}")]
    Input(String),

    /// Problem size exceeds a hard cap of the exact oracles.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A star-like scan was started from a matrix outside TA.
    #[error("candidate is not in TA: preimage minimum eigenvalue {min_eigenvalue:e}")]
    NotInTa { min_eigenvalue: f64 },

    /// The objective is not positive semidefinite, so the 2/pi bound does not apply.
    #[error("objective is not PSD (minimum eigenvalue {min_eigenvalue:e}); the 2/pi sandwich requires A >= 0")]
    NotPsd { min_eigenvalue: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
