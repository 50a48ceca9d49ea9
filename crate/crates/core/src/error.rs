use thiserror::Error;

use crate::engine::TaskError;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// `kind()` gives the stable variant name that the CLI prints on stderr.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division is not exact in the domain")]
    InexactDivision,
    #[error("division by zero")]
    DivisionByZero,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("index ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("leading block of order {order} is singular at recursion path {path}")]
    SingularLeadingBlock { order: usize, path: String },
    #[error("matrix is singular{}", .index.map(|i| format!(" (zero diagonal entry at {i})")).unwrap_or_default())]
    SingularMatrix { index: Option<usize> },
    #[error("matrix is not {0} triangular")]
    NotTriangular(&'static str),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite (non-positive pivot at recursion path {path})")]
    NotPositiveDefinite { path: String },
    #[error("pivot at recursion path {path} has no square root in the domain")]
    NonSquarePivot { path: String },
    #[error("residues are inconsistent")]
    InconsistentResidues,
    #[error("unlucky primes exhausted the prime budget ({consumed} primes tried, {needed} needed)")]
    UnluckyPrimeExhaustion { consumed: usize, needed: usize },
    #[error("results differ between worker counts {baseline} and {workers}")]
    ResultMismatch { baseline: usize, workers: usize },
    #[error("invalid random matrix spec: {0}")]
    InvalidSpec(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported Matrix Market field `{0}`")]
    UnsupportedField(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Task(#[from] TaskError),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InexactDivision => "InexactDivision",
            Error::DivisionByZero => "DivisionByZero",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DuplicateEntry { .. } => "DuplicateEntry",
            Error::SingularLeadingBlock { .. } => "SingularLeadingBlock",
            Error::SingularMatrix { .. } => "SingularMatrix",
            Error::NotTriangular(_) => "NotTriangular",
            Error::NotSymmetric => "NotSymmetric",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::NonSquarePivot { .. } => "NonSquarePivot",
            Error::InconsistentResidues => "InconsistentResidues",
            Error::UnluckyPrimeExhaustion { .. } => "UnluckyPrimeExhaustion",
            Error::ResultMismatch { .. } => "ResultMismatch",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Parse { .. } => "ParseError",
            Error::UnsupportedField(_) => "UnsupportedField",
            Error::Io(_) => "IoError",
            Error::Task(TaskError::CycleDetected { .. }) => "CycleDetected",
            Error::Task(TaskError::WorkerPanic { .. }) => "WorkerPanic",
        }
    }

    /// True for errors caused by the mathematical content of the input
    /// (singular, not positive definite, ...), as opposed to I/O or configuration.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::InexactDivision
                | Error::DivisionByZero
                | Error::SingularLeadingBlock { .. }
                | Error::SingularMatrix { .. }
                | Error::NotTriangular(_)
                | Error::NotSymmetric
                | Error::NotPositiveDefinite { .. }
                | Error::NonSquarePivot { .. }
                | Error::InconsistentResidues
                | Error::UnluckyPrimeExhaustion { .. }
                | Error::ResultMismatch { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
