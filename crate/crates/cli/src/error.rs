use dirichlet_core::Error as CoreError;

/// A failed run, carrying its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration or input data.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Solver or relaxation did not reach its target.
    #[error("{0}")]
    Unconverged(String),

    #[error("verification failed: {}", .0.join("; "))]
    ChecksFailed(Vec<String>),

    #[error("i/o error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Output(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Unconverged(_) => 3,
            CliError::ChecksFailed(_) => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NotConverged(_) | CoreError::Stalled { .. } => CliError::Unconverged(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
