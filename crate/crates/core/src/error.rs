use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid model file: {0}")]
    ModelFormat(String),

    #[error("no token reaches the minimum count of {min_count}")]
    EmptyVocabulary { min_count: u64 },

    #[error("out-of-vocabulary tokens: {}", .0.join(", "))]
    OutOfVocabulary(Vec<String>),

    #[error("word set {0} is empty")]
    EmptyWordSet(&'static str),

    #[error("invalid word sets: {0}")]
    InvalidWordSets(String),

    #[error("corpus contains no in-vocabulary tokens")]
    NoTrainableTokens,

    #[error("group {group} has {available} documents, {requested} requested")]
    InsufficientDocuments {
        group: String,
        available: u64,
        requested: u64,
    },

    #[error("group {group} is not eligible ({available} documents, {required} required)")]
    IneligibleGroup {
        group: String,
        available: u64,
        required: u64,
    },

    #[error("no group reaches the eligibility threshold")]
    NoEligibleGroups,

    #[error("no category name occurs in the corpus")]
    NoNameOccurrences,

    #[error("vector has zero norm")]
    ZeroNorm,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("column {0} is constant")]
    ConstantColumn(String),

    #[error("design matrix is rank deficient; column {0} is collinear with earlier columns")]
    RankDeficient(String),

    #[error("{rows} rows are too few for {params} parameters")]
    InsufficientRows { rows: usize, params: usize },

    #[error("missing variable: {0}")]
    MissingVariable(String),

    #[error("degenerate LOWESS neighborhood at x = {0}")]
    DegenerateNeighborhood(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("group {group}, repetition {rep}: {source}")]
    Pipeline {
        group: String,
        rep: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) => ErrorKind::Config,
            Error::ZeroNorm
            | Error::ConstantColumn(_)
            | Error::RankDeficient(_)
            | Error::DegenerateNeighborhood(_) => ErrorKind::Numerical,
            Error::Pipeline { source, .. } => source.kind(),
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
