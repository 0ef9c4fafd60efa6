use thiserror::Error;

/// Failures of a command, each tied to a process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: malformed dataset, unknown id, invalid flag value.
    #[error("{0}")]
    Input(String),

    #[error("no valid traversal: {0}")]
    Infeasible(String),

    #[error("{0}")]
    TooManyTables(String),

    #[error("{0}")]
    Unsatisfiable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::TooManyTables(_) => 4,
            CliError::Unsatisfiable(_) => 6,
            CliError::Io(_) => 1,
        }
    }
}

impl From<curvehash::Error> for CliError {
    fn from(e: curvehash::Error) -> Self {
        use curvehash::Error as E;
        match e {
            E::Infeasible(msg) => CliError::Infeasible(msg),
            E::TooManyTables { .. } => CliError::TooManyTables(e.to_string()),
            E::Unsatisfiable(_) => CliError::Unsatisfiable(e.to_string()),
            E::Io(io) => CliError::Io(io),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
