use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capacity exceeded: {what} supports n <= {max}, got n = {n}")]
    Capacity {
        what: &'static str,
        n: usize,
        max: usize,
    },

    #[error("unsupported schedule kind `{0}` for this operation")]
    UnsupportedKind(&'static str),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error(
        "integrator did not converge: max probability change {achieved:.3e} > tolerance {tolerance:.3e} after {steps} steps"
    )]
    Convergence {
        steps: usize,
        achieved: f64,
        tolerance: f64,
    },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Convergence { .. } | Error::NonFinite(_) => 3,
            Error::Io(_) | Error::Json(_) => 4,
            _ => 2,
        }
    }
}
