use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("empty dataset file")]
    EmptyFile,
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected} columns, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("degenerate conditional table for variable {var} (parent {parent:?}, parent state {state}): zero count with alpha = 0")]
    DegenerateTable {
        var: usize,
        parent: Option<usize>,
        state: u8,
    },
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("node {node}: child {child} does not precede its parent")]
    DanglingChild { node: usize, child: usize },
    #[error("node {node}: sum unit has no children")]
    EmptySum { node: usize },
    #[error("node {node}: sum weights are not normalized (logsumexp = {log_total})")]
    UnnormalizedSum { node: usize, log_total: f64 },
    #[error("node {node}: {reason}")]
    InvariantViolation { node: usize, reason: String },
    #[error("unsupported format version {found} (expected {expected})")]
    FormatVersionMismatch { found: u32, expected: u32 },
    #[error("malformed model document: {0}")]
    Format(String),
    #[error("row {row}: evidence has zero probability under the model")]
    ZeroEvidenceProbability { row: usize },
    #[error("exhaustive enumeration limited to {max} variables, model has {actual}")]
    TooManyVariables { max: usize, actual: usize },
    #[error("dataset {name}: {reason}")]
    Manifest { name: String, reason: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
