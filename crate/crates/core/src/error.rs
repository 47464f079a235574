use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("schema error: column `{column}` not found in header")]
    MissingColumn { column: String },

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("project `{project}` has {count} release(s); at least 3 are required")]
    TooFewReleases { project: String, count: usize },

    #[error("releases belong to different projects: `{0}` vs `{1}`")]
    ProjectMismatch(String, String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("learner `{0}` has no tunable parameters")]
    UnsupportedLearner(String),

    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    #[error("misaligned series: {0}")]
    Misaligned(String),

    #[error("unknown {kind} `{value}`")]
    Unknown { kind: &'static str, value: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
