use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("unknown node id {0:?}")]
    UnknownNode(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("negative sampling failed: {0}")]
    Sampling(String),

    #[error("no text corpus: every node description is empty")]
    NoCorpus,

    #[error("feature {feature:?} unavailable: {reason}")]
    MissingFeature {
        feature: &'static str,
        reason: String,
    },

    #[error("non-finite gradient in parameter block {0}")]
    NonFiniteGradient(String),

    #[error("training diverged at epoch {epoch}, batch {batch}: loss is not finite")]
    Diverged { epoch: usize, batch: usize },

    #[error("config key {key:?}: {msg}")]
    Config { key: String, msg: String },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
