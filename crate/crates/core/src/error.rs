use std::path::PathBuf;

use crate::corpus::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("corpus validation failed: {0}")]
    Validation(ValidationReport),

    #[error("unknown tag `{0}`")]
    UnknownTag(String),

    #[error("unknown manuscript `{0}`")]
    UnknownManuscript(String),

    #[error("unknown contributor `{0}`")]
    UnknownContributor(String),

    #[error("unknown region `{0}`")]
    UnknownRegion(String),

    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unsupported corpus format version {0}")]
    UnsupportedFormat(u32),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigen solver did not converge after {iterations} iterations ({converged} of {wanted} pairs)")]
    ConvergenceFailure {
        iterations: usize,
        converged: usize,
        wanted: usize,
    },

    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },

    #[error("matrix side {side} exceeds the dense limit {limit}")]
    TooLarge { side: usize, limit: usize },

    #[error("distribution is empty")]
    EmptyDistribution,

    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no manuscripts match the collection tags")]
    EmptyCollection,

    #[error("scope contains no manuscripts")]
    EmptyScope,

    #[error("missing region data: {0}")]
    MissingRegionData(String),

    #[error("missing global data: {0}")]
    MissingGlobalData(String),

    #[error("collection has no authors")]
    ZeroAuthors,

    #[error("allocation total is zero")]
    ZeroTotal,

    #[error("no transactions in {0}")]
    NoTransactions(String),

    #[error("manuscript `{0}` has no tagged references")]
    NoTaggedReferences(String),

    #[error("insufficient history: {0}")]
    InsufficientHistory(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
