use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {key}: {reason}")]
    Config { key: String, reason: String },

    #[error("config parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("representation mismatch: expected {expected:?}, found {found:?}")]
    Representation {
        expected: crate::spinor::Representation,
        found: crate::spinor::Representation,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("mode {mode} outside [{min}, {max}]")]
    ModeOutOfRange { mode: i64, min: i64, max: i64 },

    #[error("{0}")]
    Domain(String),

    #[error("norm drift {drift:e} in column N_p = {mode} at step {step}")]
    NormDrift { mode: i64, step: usize, drift: f64 },

    #[error("no bound states found in ({lo}, {hi})")]
    NoRoots { lo: f64, hi: f64 },

    #[error("dense oracle limited to Nz <= {max}, got {nz}")]
    OracleTooLarge { nz: usize, max: usize },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: &str, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.to_string(),
            reason: reason.into(),
        }
    }
}
