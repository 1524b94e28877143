use thiserror::Error;

/// Failures mapped to the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<satlab::Error> for CliError {
    fn from(e: satlab::Error) -> Self {
        use satlab::Error as E;
        match e {
            E::EigenNonConvergence { .. }
            | E::PoolExhausted { .. }
            | E::InsufficientDegree { .. }
            | E::AntipodalDegeneracy
            | E::DegenerateGrid(_)
            | E::InsufficientData(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}
