use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("missing file: {0}")]
    MissingFile(PathBuf),

    #[error("duplicate corpus id `{0}`")]
    DuplicateId(String),

    #[error("malformed manifest at line {line}, column {column}: {message}")]
    MalformedManifest {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("cannot decode {path} as {encoding} at byte offset {offset}")]
    Decode {
        path: PathBuf,
        encoding: String,
        offset: usize,
    },

    #[error("invalid tokenization policy: {0}")]
    InvalidPolicy(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("malformed lemma map at line {line}: {message}")]
    MalformedMap { line: usize, message: String },

    #[error("type `{0}` appears in more than one lemma group")]
    OverlappingGroups(String),

    #[error("no lemma group has modified tokens and modified types")]
    NoUsableGroups,

    #[error("lambda_t must exceed 1 for the calibrated ratio, got {0}")]
    DegenerateLambdaT(f64),

    #[error("invalid calibration factor: {0}")]
    InvalidFactor(String),

    #[error("sample too small: need at least {min}, got {got}")]
    SampleTooSmall { min: usize, got: usize },

    #[error("sample too large: at most {max} values, got {got}")]
    SampleTooLarge { max: usize, got: usize },

    #[error("sample has zero variance")]
    ZeroVariance,

    #[error("sample contains a non-finite value at index {0}")]
    NonFinite(usize),

    #[error("all values are tied")]
    AllValuesTied,

    #[error("need at least {min} groups, got {got}")]
    TooFewGroups { min: usize, got: usize },

    #[error("contingency table {0}")]
    InvalidTable(String),

    #[error("contingency table has an empty {axis} `{label}`")]
    ZeroMarginal { axis: &'static str, label: String },

    #[error("invalid comparison spec: {0}")]
    InvalidSpec(String),

    #[error("unknown corpus id `{0}`")]
    UnknownCorpus(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
