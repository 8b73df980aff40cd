use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: expected {expected} fields, found {found}")]
    MalformedRow {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: cannot parse {value:?} as a number")]
    NonNumericCell {
        line: u64,
        column: usize,
        value: String,
    },
    #[error("ARFF syntax error at line {line}: {message}")]
    ArffSyntax { line: usize, message: String },
    #[error(
        "attribute {name:?} has unsupported type {kind:?} (only numeric and nominal are supported)"
    )]
    UnsupportedAttributeType { name: String, kind: String },
    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("row {row}: class value {value} is not 2 (benign) or 4 (malignant)")]
    InvalidClassValue { row: usize, value: f64 },
    #[error("row {row} still contains a missing value")]
    MissingValue { row: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("no candidate rows left after exclusion")]
    EmptyCandidateSet,
    #[error("sample size {m} exceeds n - 1 = {max}")]
    SampleTooLarge { m: usize, max: usize },
    #[error("need at least {k} points, got {n}")]
    TooFewPoints { n: usize, k: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("no center for cluster {0}")]
    MissingCenter(usize),
    #[error("invalid medoid index {0}")]
    InvalidMedoid(usize),
    #[error("silhouette needs at least two clusters")]
    SingleCluster,
    #[error("no class labels available")]
    NoLabels,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("report does not match its schema: {0}")]
    Schema(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for failures caused by the input file rather than by the analysis.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::MalformedRow { .. }
                | Error::NonNumericCell { .. }
                | Error::ArffSyntax { .. }
                | Error::UnsupportedAttributeType { .. }
                | Error::DuplicateColumn(_)
                | Error::UnknownColumn(_)
                | Error::InvalidClassValue { .. }
                | Error::MissingValue { .. }
                | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
