use std::io;
use std::path::{Path, PathBuf};

use lasekit::{DynamicsError, ModelError, NumericsError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid or incomplete configuration; the message names the offending key.
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("integrator failure: {0}")]
    Integrator(DynamicsError),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        CliError::Io { path: path.as_ref().to_path_buf(), source }
    }

    /// Process exit code: 2 config, 3 I/O, 4 integrator.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Integrator(_) => 4,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Invalid { name, value, requirement } => {
                CliError::Config(format!("params.{name}: must be {requirement}, got {value}"))
            }
            ModelError::Degenerate(msg) => CliError::Config(format!("params: {msg}")),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::InvalidConfig(key) => CliError::Config(format!("integrator.{key}: invalid value")),
            DynamicsError::Model(m) => m.into(),
            other => CliError::Integrator(other),
        }
    }
}

impl From<NumericsError> for CliError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::Model(m) => m.into(),
            NumericsError::Dynamics(d) => d.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}
