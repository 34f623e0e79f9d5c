use thiserror::Error;

/// Errors raised by the witness toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("gradient undefined: matrix is singular (min eigenvalue {min_eigenvalue:e})")]
    SingularGradient { min_eigenvalue: f64 },

    #[error("symmetric eigensolver did not converge (n = {n}, max |a_ij| = {norm:e})")]
    NonConvergence { n: usize, norm: f64 },

    #[error("invalid partition {text:?}: {reason}")]
    Partition { text: String, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state load failed: {0}")]
    Load(String),

    #[error("unknown built-in state {0:?}")]
    UnknownState(String),

    #[error("state carries no measurement error model (sigma_xx / sigma_pp)")]
    MissingErrorModel,

    #[error("violation score undefined: sigma(X, P) is zero")]
    ZeroSigma,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
