use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An iterative procedure stopped before meeting its tolerance.
    #[error("not converged after {iterations} iterations: {detail} (best residuals {residuals:?})")]
    NotConverged {
        iterations: usize,
        residuals: Vec<f64>,
        detail: String,
    },

    #[error("cutoff too small for mode {mode}: {got} < required {required}")]
    CutoffTooSmall {
        mode: usize,
        got: usize,
        required: usize,
    },

    #[error("rank-deficient input: {0}")]
    RankDeficient(String),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Internal consistency check failed; indicates a bug rather than bad input.
    #[error("consistency check failed: {0}")]
    Inconsistent(String),

    #[error("linear algebra backend failure: {0}")]
    Backend(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
