use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Λ (or another matrix that must be Hermitian positive definite) is not.
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("matrix is not Hermitian (relative asymmetry {0:e})")]
    NotHermitian(f64),

    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NotConverged { iterations: usize, residual: f64 },

    /// A quadratic form that must be strictly positive vanished.
    #[error("degenerate problem: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::Parse(_) | Error::DimensionMismatch(_) => 2,
            Error::NotPositiveDefinite(_)
            | Error::NotHermitian(_)
            | Error::NotConverged { .. }
            | Error::Degenerate(_) => 3,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        }
    }

    /// Short machine-readable tag, used in result rows.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidConfig(_) => "invalid_config",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::NotPositiveDefinite(_) => "not_positive_definite",
            Error::NotHermitian(_) => "not_hermitian",
            Error::NotConverged { .. } => "not_converged",
            Error::Degenerate(_) => "degenerate",
            Error::Parse(_) => "parse_error",
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => "io_error",
        }
    }
}
