use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{test}: needs at least {needed} bits, got {got}")]
    InsufficientLength {
        test: String,
        needed: usize,
        got: usize,
    },

    #[error("unknown test id `{0}`")]
    UnknownTest(String),

    #[error("unknown ticker `{0}`")]
    UnknownTicker(String),

    #[error("cannot concatenate days of different tickers: {0} and {1}")]
    MixedTickers(String, String),

    #[error("generator `{name}`: {message}")]
    Generator { name: String, message: String },

    #[error("missing day files: {0:?}")]
    MissingDays(Vec<String>),

    #[error("export refused: {0}")]
    ExportRefused(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
