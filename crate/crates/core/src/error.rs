use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Where a bad value was found: a file and 1-based line, or an in-memory table and row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub source: String,
    pub line: u64,
}

impl Location {
    pub fn new(source: impl Into<String>, line: u64) -> Self {
        Self {
            source: source.into(),
            line,
        }
    }
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.source, self.line)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{location}: column `{column}`: {message}")]
    Malformed {
        location: Location,
        column: String,
        message: String,
    },

    #[error("{location}: unknown {kind} `{id}`")]
    DanglingReference {
        location: Location,
        kind: &'static str,
        id: String,
    },

    #[error("{location}: duplicate {kind} `{id}`")]
    DuplicateKey {
        location: Location,
        kind: &'static str,
        id: String,
    },

    #[error("wage for rank `{rank}` must be strictly positive, got {wage}")]
    NonPositiveWage { rank: String, wage: f64 },

    #[error("empty byline")]
    EmptyByline,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("data inconsistency: {0}")]
    Inconsistent(String),

    #[error("degenerate statistics: {0}")]
    Degenerate(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

impl Error {
    pub fn malformed(location: Location, column: &str, message: impl Into<String>) -> Self {
        Self::Malformed {
            location,
            column: column.to_string(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            already @ Self::Stage { .. } => already,
            other => Self::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    /// Process exit code: 1 validation, 2 data inconsistency, 3 degenerate
    /// statistics. Broken references and duplicate keys between corpus files
    /// count as inconsistencies; bad values in a single row as validation errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Stage { source, .. } => source.exit_code(),
            Self::Inconsistent(_) | Self::DanglingReference { .. } | Self::DuplicateKey { .. } => 2,
            Self::Degenerate(_) => 3,
            _ => 1,
        }
    }
}
