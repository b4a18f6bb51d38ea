//! Experiment drivers, configuration and persistence behind the `dtcforge`
//! command-line tool.
//!
//! A run is described by one TOML [`config::ExperimentConfig`] (strictly
//! parsed: unknown keys and out-of-range values are errors), executes fully
//! deterministically from its named seeds, and leaves a directory of CSV/JSON
//! artifacts plus a `manifest.json` written last, listing every file with its
//! checksum and embedding the resolved config for reproduction.

pub mod artifacts;
pub mod config;
pub mod runs;

use std::path::PathBuf;

use thiserror::Error;

use crate::chain::ChainError;
use crate::dicke::DickeError;
use crate::optimizer::OptimizerError;
use crate::pulse::PulseError;
use crate::spectral::SpectralError;

/// Process exit code for configuration and input errors.
pub const EXIT_CONFIG: u8 = 2;
/// Process exit code for numerical divergence.
pub const EXIT_DIVERGENCE: u8 = 3;
/// Process exit code for filesystem failures.
pub const EXIT_IO: u8 = 4;

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error("config parse error in {path}: {message}")]
    Parse {
        path: PathBuf,
        message: String,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error(transparent)]
    Dicke(#[from] DickeError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
}

impl WorkbenchError {
    /// Maps the error class onto the CLI exit code contract.
    pub fn exit_code(&self) -> u8 {
        match self {
            WorkbenchError::Io { .. } => EXIT_IO,
            WorkbenchError::Dicke(DickeError::Diverged { .. }) => EXIT_DIVERGENCE,
            WorkbenchError::Optimizer(OptimizerError::Dicke(DickeError::Diverged { .. })) => {
                EXIT_DIVERGENCE
            }
            _ => EXIT_CONFIG,
        }
    }
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> WorkbenchError {
    let path = path.into();
    move |source| WorkbenchError::Io { path, source }
}
