use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("target column `{0}` not found in header")]
    MissingTarget(String),

    #[error("duplicate column name `{0}`")]
    DuplicateName(String),

    #[error("line {line}, column `{column}`: cannot parse `{value}` as a number")]
    NonNumeric {
        line: u64,
        column: String,
        value: String,
    },

    #[error("line {line}, column `{column}`: non-finite value `{value}`")]
    NonFinite {
        line: u64,
        column: String,
        value: String,
    },

    #[error("classification target must be 0 or 1, found {value} at sample {sample}")]
    InvalidLabel { sample: usize, value: f64 },

    #[error("classification target contains a single class")]
    SingleClass,

    #[error("`{0}` has zero variance")]
    ZeroVariance(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("singular system (condition estimate {0:e})")]
    Singular(f64),

    #[error("solver diverged: {0}")]
    Diverged(String),

    #[error("logistic fit did not converge within {0} iterations")]
    NotConverged(usize),

    #[error("feature index {index} out of range for {n_features} features")]
    IndexOutOfRange { index: usize, n_features: usize },

    #[error("feature names differ between rankings")]
    NameMismatch,

    #[error("invalid ranking: {0}")]
    InvalidRanking(String),

    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),

    #[error("removal step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
