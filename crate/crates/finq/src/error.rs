use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum FinqError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("solver did not converge: {0}")]
    NonConvergent(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl FinqError {
    /// Process exit code for the CLI: 2 usage, 3 data, 4 capacity.
    pub fn exit_code(&self) -> u8 {
        match self {
            FinqError::Parameter(_) | FinqError::Config(_) => 2,
            FinqError::Capacity(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, FinqError>;
