use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A linear solve or a formula hit a (near) singularity.
    #[error("numeric failure: {message} (condition estimate {condition:.3e})")]
    NumericFailure { message: String, condition: f64 },

    /// An iterative method ran out of iterations; carries the best iterate.
    #[error("no convergence after {iterations} iterations: best {best} with |residual| = {residual:.3e}")]
    NoConvergence {
        iterations: usize,
        best: Complex64,
        residual: f64,
    },

    /// No seed converged; carries `(Re τ, Im τ, |mismatch|)` samples of the
    /// coarse search landscape.
    #[error("no admissible root from {seeds} seeds (landscape of {} samples attached)", landscape.len())]
    NoRoot {
        seeds: usize,
        landscape: Vec<(f64, f64, f64)>,
    },

    #[error("critical-point tracking failed beyond x = {last_x}: {reason}")]
    Tracking { last_x: f64, reason: String },

    #[error("stability failure at x = {at}: {reason}")]
    Stability { at: f64, reason: String },

    #[error("compatibility violated: {0}")]
    Compatibility(String),

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("configuration error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
