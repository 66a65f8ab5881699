use thiserror::Error;

/// Errors raised by the DNLS laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DnlsError {
    /// A grid or cutoff too small to represent the requested band.
    #[error("cutoff violation: {0}")]
    CutoffViolation(String),

    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The requested problem size exceeds the guard of a brute-force routine.
    #[error("resource guard: {0}")]
    ResourceGuard(String),

    /// The supplied mean mass does not match the state.
    #[error("inconsistent mu: supplied {supplied}, state has {actual}")]
    InconsistentMu { supplied: f64, actual: f64 },

    /// Non-finite coefficients appeared during time stepping.
    #[error("divergence at t = {time}")]
    Divergence { time: f64 },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for DnlsError {
    fn from(e: std::io::Error) -> Self {
        DnlsError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, DnlsError>;
