use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] regvar::Error),

    #[error("{path}: {msg}")]
    Data { path: String, msg: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(_) | CliError::Data { .. } => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
