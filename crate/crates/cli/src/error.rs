use std::io;

use tdlhf_core::quadrature::QuadError;
use thiserror::Error;

/// Failure of a command, classified by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Args(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Args(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Args(_) => "bad_arguments",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }

    /// Single-line JSON form written to stderr.
    pub fn machine_line(&self) -> String {
        serde_json::json!({ "error": { "kind": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() } })
            .to_string()
    }
}

impl From<tdlhf_core::Error> for CliError {
    fn from(e: tdlhf_core::Error) -> Self {
        use tdlhf_core::Error as E;
        match &e {
            E::InvalidArgument(_)
            | E::SmallQ { .. }
            | E::Config(_)
            | E::Quadrature(QuadError::InvalidInterval { .. } | QuadError::InvalidSpec(_)) => CliError::Args(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
