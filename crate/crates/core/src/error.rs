use thiserror::Error;

use crate::corpus::CorpusError;
use crate::eval::EvalError;
use crate::experiment::ConfigError;
use crate::model::ModelError;
use crate::preprocess::PreprocessError;
use crate::stats::StatsError;
use crate::weights::WeightsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-wide error, one variant per subsystem.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Weights(#[from] WeightsError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures caused by bad input data or configuration, as
    /// opposed to runtime failures (I/O, diverged training).
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Corpus(CorpusError::Io { .. }) => false,
            Error::Corpus(_) | Error::Config(_) | Error::Weights(_) | Error::Eval(_) => true,
            Error::Preprocess(_) => true,
            Error::Model(e) => e.is_validation(),
            Error::Stats(StatsError::EmptyInput) => true,
            Error::Stats(_) | Error::Io { .. } => false,
        }
    }
}
