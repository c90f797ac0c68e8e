use std::path::PathBuf;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("data error: {0}")]
    Data(String),

    #[error("cannot normalize row {row} ({id}): zero vector")]
    Normalization { row: usize, id: String },

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing key {0:?}")]
    MissingKey(String),

    #[error("id {0:?} not present in the database")]
    MissingId(String),

    #[error("descriptor sets are not aligned; first mismatched id {0:?}")]
    IdMismatch(String),

    #[error("frame mismatch: {left:?} vs {right:?}")]
    FrameMismatch {
        left: crate::cloud::Frame,
        right: crate::cloud::Frame,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
