use std::fmt;

/// Error type shared by all modules of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Two objects that must agree in shape do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// An assignment is outside the label simplex beyond tolerance.
    #[error("infeasible assignment: {0}")]
    Infeasible(String),
    /// The solver produced non-finite values and cannot continue.
    #[error("solver failure: non-finite value detected at iteration {iteration}")]
    SolverNumeric { iteration: usize },
    /// A file does not conform to one of the documented formats.
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl fmt::Display) -> Self {
        Error::InvalidInput(msg.to_string())
    }

    pub(crate) fn dims(msg: impl fmt::Display) -> Self {
        Error::DimensionMismatch(msg.to_string())
    }
}
