use std::fmt;

/// CLI failure classes, each with its own exit code so scripts can
/// react to the cause: 2 for bad configuration, 3 for unreadable or
/// unwritable files, 4 for numerical failure inside the solver.
#[derive(Debug)]
pub enum CliError {
    /// Invalid or inconsistent configuration (exit code 2).
    Config(String),
    /// A file could not be read, parsed, or written (exit code 3).
    Io(String),
    /// The solver produced non-finite iterates (exit code 4).
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError::Io(message.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<liftgraph::Error> for CliError {
    fn from(error: liftgraph::Error) -> Self {
        match &error {
            liftgraph::Error::SolverNumeric { .. } => CliError::Numeric(error.to_string()),
            liftgraph::Error::Io(_) | liftgraph::Error::Format(_) => {
                CliError::Io(error.to_string())
            }
            _ => CliError::Config(error.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
