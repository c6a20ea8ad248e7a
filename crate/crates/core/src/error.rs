use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("evaluation failed at point #{index}: {source}")]
    AtPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("LP iteration cap of {cap} exceeded; membership is indeterminate")]
    IterationCap { cap: usize },

    #[error("LP is numerically indeterminate: {0}")]
    Indeterminate(String),

    #[error("invalid chain: {0}")]
    Chain(String),

    #[error("schema error at `{key}`: {message}")]
    Schema { key: String, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn schema(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn in_stage(stage: &'static str, err: Error) -> Self {
        Error::Stage {
            stage,
            source: Box::new(err),
        }
    }

    pub fn at_point(index: usize, err: Error) -> Self {
        Error::AtPoint {
            index,
            source: Box::new(err),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
