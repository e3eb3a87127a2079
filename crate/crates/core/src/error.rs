use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { msg: String, pos: usize },

    #[error("integer {0} exceeds the trial-division bound; cannot certify the norm test")]
    FactorBound(String),

    #[error("mixed fields: {0} vs {1}")]
    FieldMismatch(String, String),

    #[error("{0}")]
    Unsupported(String),

    #[error("search bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn parse(msg: impl Into<String>, pos: usize) -> Self {
        Error::Parse {
            msg: msg.into(),
            pos,
        }
    }
}
