use thiserror::Error;

/// Command failure, carrying the process exit code class.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<lttp_core::Error> for CliError {
    fn from(e: lttp_core::Error) -> Self {
        use lttp_core::Error as E;
        if let E::ImagesFailed { failures } = &e {
            for f in failures {
                log::error!("{f}");
            }
        }
        let msg = e.to_string();
        match e {
            E::OracleMismatch(_) => CliError::Internal(msg),
            e if e.is_io() => CliError::Io(msg),
            _ => CliError::Validation(msg),
        }
    }
}
