use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("row {row}: {message}")]
    Row { row: usize, message: String },

    #[error("event log is empty")]
    EmptyLog,

    #[error("input error: {0}")]
    Input(String),

    #[error("labeling rule error: {0}")]
    Rule(String),

    #[error("split error: {0}")]
    Split(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("encoding error: {0}")]
    Encode(String),

    #[error("feature schema mismatch at column {index}: expected `{expected}`, found `{found}`")]
    SchemaMismatch {
        index: usize,
        expected: String,
        found: String,
    },

    #[error("training error: {0}")]
    Train(String),

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("metric undefined: {0}")]
    Metric(String),

    #[error("search error: {0}")]
    Search(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Error {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }
}
