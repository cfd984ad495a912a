use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A malformed or out-of-range input line. `line` is 1-based.
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },

    #[error("duplicate record id {0:?}")]
    DuplicateId(String),

    #[error("unsupported index version {0:?}")]
    UnsupportedVersion(String),

    #[error("region {region:?}: corrupt or truncated record file: {detail}")]
    CorruptRegion { region: String, detail: String },

    #[error("geojson: {0}")]
    GeoJson(String),

    #[error("empty grid")]
    EmptyGrid,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("exact transport limited to {limit} cells, got {cells}; use the sliced variant")]
    SizeLimit { cells: usize, limit: usize },

    #[error("unbalanced masses: {0} vs {1}")]
    Unbalanced(f64, f64),

    #[error("weight out of range 0..5: {0}")]
    WeightOutOfRange(i64),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("empty window")]
    EmptyWindow,

    #[error("unknown region {0:?}")]
    UnknownRegion(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn line(line: usize, message: impl Into<String>) -> Self {
        Error::Line {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
