use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("{0}")]
    Value(String),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Value(_) => 1,
            CliError::InvalidLattice(_) => 2,
            CliError::Mismatch(_) => 3,
        }
    }
}
