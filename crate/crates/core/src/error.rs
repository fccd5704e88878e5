use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Problems with a binary embedding or checkpoint file.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic {found:?} at byte 0, expected {expected:?}")]
    BadMagic { expected: String, found: String },
    #[error("unsupported version {0} at byte 4")]
    BadVersion(u16),
    #[error("unknown matrix kind {0} at byte 6")]
    BadKind(u8),
    #[error("reserved byte is {0}, expected 0 (byte 7)")]
    BadReserved(u8),
    #[error("truncated at byte {offset}: need {needed} more bytes")]
    Truncated { offset: usize, needed: usize },
    #[error("{extra} unexpected trailing bytes at byte {offset}")]
    TrailingBytes { offset: usize, extra: usize },
    #[error("non-finite value at byte {offset}")]
    NonFinite { offset: usize },
    #[error("zero dimension at byte {offset}")]
    ZeroDim { offset: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error("{file}:{line}: field `{field}`: {message}")]
    Schema {
        file: PathBuf,
        line: usize,
        field: String,
        message: String,
    },
    #[error("dangling references: {}", missing.join(", "))]
    DanglingReference { missing: Vec<String> },
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        expected: usize,
        found: usize,
        context: String,
    },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("zero-norm vector: {0}")]
    ZeroNorm(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("missing embeddings for {}", ids.join(", "))]
    MissingEmbeddings { ids: Vec<String> },
    #[error("no gold annotations; aggregate the raw annotations first")]
    NoGold,
    #[error("missing gold annotation for {}", ids.join(", "))]
    MissingGold { ids: Vec<String> },
    #[error("zero variance in {0}: correlation undefined")]
    ZeroVariance(String),
    #[error("tied vote: {0}; use an odd annotator panel")]
    TiedVote(String),
    #[error("non-finite loss at epoch {epoch}, batch {batch}: {detail}")]
    NonFiniteLoss {
        epoch: usize,
        batch: usize,
        detail: String,
    },
    #[error("remote service error: {0}")]
    Remote(String),
    #[error("sentence {index}: {source}")]
    Sentence {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("json error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
