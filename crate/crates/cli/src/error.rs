use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag or flag combination; exit code 1.
    #[error("{flag}: {reason}")]
    Usage { flag: String, reason: String },

    #[error(transparent)]
    Core(#[from] unexpect_core::Error),

    #[error("{0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn usage(flag: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Usage {
            flag: flag.into(),
            reason: reason.into(),
        }
    }

    pub fn io_at(path: &std::path::Path, e: io::Error) -> Self {
        CliError::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 1,
            CliError::Core(e) if e.is_validation() => 1,
            CliError::Core(_) | CliError::Io(_) => 2,
        }
    }

    pub fn is_broken_pipe(&self) -> bool {
        match self {
            CliError::Io(e) => e.kind() == io::ErrorKind::BrokenPipe,
            CliError::Core(unexpect_core::Error::Io(e)) => e.kind() == io::ErrorKind::BrokenPipe,
            _ => false,
        }
    }

    /// One-line diagnostic; parameter errors are reported against their flag.
    pub fn diagnostic(&self) -> String {
        match self {
            CliError::Core(unexpect_core::Error::InvalidParameter { name, reason }) => {
                format!("--{name}: {reason}")
            }
            other => other.to_string(),
        }
    }
}
