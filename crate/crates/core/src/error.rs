use thiserror::Error;

/// Errors produced by the summarization library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty graph")]
    EmptyGraph,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: String, found: String },

    #[error("eigensolver did not converge after {iterations} restarts (worst residual {worst_residual:.3e})")]
    Convergence {
        iterations: usize,
        worst_residual: f64,
        residuals: Vec<f64>,
    },

    #[error("singular Cayley system at step size {tau}")]
    Step { tau: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("input too large for dense oracle: n = {n} exceeds {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::Dimension {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
