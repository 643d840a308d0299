use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("generator index {index} outside alphabet of size {size}")]
    AlphabetMismatch { index: usize, size: usize },

    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("relator index {index} out of range (presentation has {count} relators)")]
    RelatorIndex { index: usize, count: usize },

    #[error("move needs two distinct relators, got {0} twice")]
    SameRelator(usize),

    #[error("relator {0} is not empty")]
    NonEmptyRelator(usize),

    #[error("stabilization is only allowed before any other move (move {0})")]
    LateStabilize(usize),

    #[error("move {index} failed: {source}")]
    Replay {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("word has t-exponent sum {0}, expected 0")]
    NonZeroExponent(i64),

    #[error("tower overflow: {0}")]
    TowerOverflow(String),

    #[error("certificate does not match: {0}")]
    Certificate(String),

    #[error("plan rejected: {0}")]
    Plan(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
