//! Crate-wide error type and the process exit codes derived from it.

use std::path::PathBuf;

use thiserror::Error;

use crate::eval::EvalError;
use crate::linear::LinearError;
use crate::pose::PoseError;
use crate::prep::PrepError;
use crate::rocket::RocketError;
use crate::synth::SynthError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Pose(#[from] PoseError),
    #[error(transparent)]
    Prep(#[from] PrepError),
    #[error(transparent)]
    Rocket(#[from] RocketError),
    #[error(transparent)]
    Linear(#[from] LinearError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("quality gate failed for {}", parts.join(", "))]
    QualityGate { parts: Vec<String> },
    #[error("clip {clip_id}: {source}")]
    Clip {
        clip_id: String,
        #[source]
        source: Box<Error>,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad file format: {0}")]
    Format(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("preprocessing config hash {found} does not match the model's {expected}")]
    ConfigMismatch { expected: String, found: String },
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn in_clip(self, clip_id: &str) -> Self {
        match self {
            e @ Error::Clip { .. } => e,
            e => Error::Clip { clip_id: clip_id.to_string(), source: Box::new(e) },
        }
    }

    /// 1 usage, 2 data, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) => 1,
            Error::Linear(LinearError::NumericalFailure(_)) => 3,
            Error::Clip { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
