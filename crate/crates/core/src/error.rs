//! Error type shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by corpus I/O, validation, and pipeline stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed record file; `line` is 1-based and counts the header.
    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// A domain-type invariant failed for a specific video.
    #[error("video '{video}': invalid {field}: {msg}")]
    Invariant {
        video: String,
        field: &'static str,
        msg: String,
    },

    /// A configuration value is out of range or inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// An operation received arguments that violate its contract.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("video mismatch: expected '{expected}', found '{found}'")]
    VideoMismatch { expected: String, found: String },

    #[error("missing prediction for video '{0}'")]
    MissingPrediction(String),

    #[error("coverage mismatch: {0}")]
    CoverageMismatch(String),

    /// The toy trainer hit the divergence guard.
    #[error("training diverged at epoch {epoch}: loss {loss}")]
    Diverged { epoch: usize, loss: f64 },

    /// Wraps an error with the pipeline stage that produced it.
    #[error("[{stage}] {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    pub fn invariant(video: impl Into<String>, field: &'static str, msg: impl Into<String>) -> Self {
        Error::Invariant {
            video: video.into(),
            field,
            msg: msg.into(),
        }
    }

    /// Tags an error with the stage it came from.
    pub fn stage(stage: &'static str, source: Error) -> Self {
        Error::Stage {
            stage,
            source: Box::new(source),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
