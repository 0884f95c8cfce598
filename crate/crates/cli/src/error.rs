use std::io;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("every requested lambda violates the spectral gap condition")]
    AllGapViolations,

    #[error(transparent)]
    Core(#[from] fredholm_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 2 usage, 3 spectral gap for every lambda, 4 resource cap, 1 anything else.
    pub fn exit_code(&self) -> ExitCode {
        use fredholm_core::Error as E;
        let code = match self {
            CliError::Usage(_) | CliError::Core(E::Usage(_)) => 2,
            CliError::AllGapViolations | CliError::Core(E::SpectralGap { .. }) => 3,
            CliError::Core(E::ResourceCap { .. }) => 4,
            _ => 1,
        };
        ExitCode::from(code)
    }
}

pub type CliResult<T> = Result<T, CliError>;
