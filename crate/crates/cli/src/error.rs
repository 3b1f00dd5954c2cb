use std::path::Path;

use thiserror::Error;

/// Failures surfaced by the command line, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical abort: {0}")]
    Numerical(String),

    #[error("sweep incomplete: {failed} of {total} runs failed")]
    PartialSweep { failed: usize, total: usize },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub const EXIT_CONFIG: i32 = 2;
    pub const EXIT_NUMERICAL: i32 = 3;
    pub const EXIT_PARTIAL_SWEEP: i32 = 4;
    pub const EXIT_IO: i32 = 1;

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => Self::EXIT_CONFIG,
            CliError::Numerical(_) => Self::EXIT_NUMERICAL,
            CliError::PartialSweep { .. } => Self::EXIT_PARTIAL_SWEEP,
            CliError::Io { .. } => Self::EXIT_IO,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            context: path.display().to_string(),
            source,
        }
    }
}

impl From<sauter_core::Error> for CliError {
    fn from(e: sauter_core::Error) -> Self {
        use sauter_core::Error as E;
        match e {
            E::Config { .. } | E::Parse { .. } => CliError::Config(e.to_string()),
            E::Io(source) => CliError::Io {
                context: "I/O".into(),
                source,
            },
            other => CliError::Numerical(other.to_string()),
        }
    }
}
