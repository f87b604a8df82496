use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("cycle length {0} is not supported (expected 3..=6)")]
    InvalidCycleLength(usize),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("constraint violated: {quantity}: {detail}")]
    Constraint { quantity: String, detail: String },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),

    #[error("unreachable target: {0}")]
    UnreachableTarget(String),

    #[error("unknown property `{0}`")]
    UnknownProperty(String),

    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{}:{line}: malformed line: {detail}", .path.display())]
    MalformedLine {
        path: PathBuf,
        line: usize,
        detail: String,
    },

    #[error("{}:{line}: node id {node} does not exist", .path.display())]
    DanglingNode {
        path: PathBuf,
        line: usize,
        node: usize,
    },

    #[error("inconsistent graph indicator: {0}")]
    InconsistentIndicator(String),

    #[error("schema violation in field `{field}`: {detail}")]
    Schema { field: String, detail: String },

    #[error("mismatched records: {0}")]
    MismatchedRecords(String),

    #[error("no baseline result for type {0}")]
    NoBaseline(String),

    #[error("no graph-aware result for type {0}")]
    NoGraphMethod(String),

    #[error("class count must be at least 2, got {0}")]
    InvalidClassCount(usize),

    #[error("R* must be positive")]
    ZeroRStar,

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("class {class} has {count} members, fewer than {k} folds")]
    ClassTooSmall { class: usize, count: usize, k: usize },

    #[error("dataset too small: {0}")]
    TooSmall(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad arguments or a specification that violates a constraint.
    Usage,
    /// Malformed or inconsistent input data.
    Data,
    /// A numerical or internal invariant failed.
    Internal,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidCycleLength(_) | Constraint { .. } | InfeasibleTarget(_) | UnknownProperty(_)
            | InvalidClassCount(_) | Config(_) => ErrorClass::Usage,
            InvalidGraph(_) | EmptyDataset | Degenerate(_) | MissingFile(_)
            | MalformedLine { .. } | DanglingNode { .. } | InconsistentIndicator(_)
            | Schema { .. } | MismatchedRecords(_) | NoBaseline(_) | NoGraphMethod(_)
            | ZeroRStar | UndefinedCorrelation(_) | ClassTooSmall { .. } | TooSmall(_)
            | Io(_) | Json(_) => ErrorClass::Data,
            UnreachableTarget(_) | Singular(_) => ErrorClass::Internal,
        }
    }

    pub(crate) fn constraint(quantity: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Constraint {
            quantity: quantity.into(),
            detail: detail.into(),
        }
    }

    pub(crate) fn schema(field: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            detail: detail.into(),
        }
    }
}
