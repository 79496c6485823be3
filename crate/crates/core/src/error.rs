use std::path::PathBuf;

/// Errors produced by the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{file}: expected header {expected:?}, found {found:?}")]
    BadHeader {
        file: String,
        expected: String,
        found: String,
    },

    #[error("{file}: row {row}, column {column}: {reason} value {value:?}")]
    BadValue {
        file: String,
        /// 1-based data row index (header not counted).
        row: usize,
        column: String,
        value: String,
        reason: &'static str,
    },

    #[error("{file}: expected {expected} data rows, found {found}")]
    SeriesLengthMismatch {
        file: String,
        expected: usize,
        found: usize,
    },

    #[error("no label found for record {0}")]
    MissingLabel(String),

    #[error("label for {0} has no matching record file")]
    OrphanLabel(String),

    #[error("duplicate record id {0}")]
    DuplicateId(String),

    #[error("invalid label code {code:?} for record {id}: expected an integer in 0..=3")]
    InvalidLabelCode { id: String, code: String },

    #[error("test fraction must lie in (0, 1), got {0}")]
    InvalidFraction(f64),

    #[error("class {label} has {count} members, at least {needed} required")]
    ClassTooSmall {
        label: String,
        count: usize,
        needed: usize,
    },

    #[error("series of length {0} too short, at least 2 points required")]
    SeriesTooShort(usize),

    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { got: usize, needed: usize },

    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("labels length {labels} does not match row count {rows}")]
    LabelCount { rows: usize, labels: usize },

    #[error("feature column {0:?} missing from input")]
    MissingColumn(String),

    #[error("feature columns do not match training columns (expected {expected} columns starting {head:?})")]
    ColumnMismatch { expected: usize, head: String },

    #[error("training data contains a single class; at least 2 required")]
    SingleClass,

    #[error("fold count must be at least 2, got {0}")]
    InvalidFoldCount(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for errors about data shape / stratification rather than input
    /// format. The CLI maps these to a distinct exit code.
    pub fn is_data_shape(&self) -> bool {
        matches!(
            self,
            Error::ClassTooSmall { .. } | Error::InvalidFoldCount(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
