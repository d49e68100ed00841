use thiserror::Error;

/// Errors raised across the analysis pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid rational `{0}`")]
    InvalidRational(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("auxiliary graph requires connected vertex set")]
    AuxiliaryDisconnected,

    #[error("system not class-decomposed")]
    NotClassDecomposed,

    #[error("no positive kernel point")]
    NoPositiveKernelPoint,

    #[error("y not in Y_c: {0}")]
    BinomialViolated(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("non-positive input: {0}")]
    NonPositive(String),

    #[error("{0}")]
    Convergence(String),

    #[error("residual check failed: {0}")]
    Residual(String),

    #[error("salt certificate: {0}")]
    Salt(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
