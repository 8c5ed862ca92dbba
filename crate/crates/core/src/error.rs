use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid constraint component: {0}")]
    InvalidComponent(String),

    #[error("degenerate projection input: {0}")]
    Degenerate(String),

    #[error("invalid objective: {0}")]
    InvalidObjective(String),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid weight matrix: {0}")]
    InvalidWeights(String),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("agent {agent} diverged at iteration {iteration}: |x| = {norm:e}")]
    Diverged {
        agent: usize,
        iteration: usize,
        norm: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
