use crate::UnitId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported dimension {0} (expected 2, 3 or 4)")]
    UnsupportedDimension(usize),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("need at least {needed} points, got {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("unknown unit {0}")]
    UnknownUnit(UnitId),
    #[error("self-loop on unit {0}")]
    SelfLoop(UnitId),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("non-manifold edge ({0}, {1}) has {2} incident triangles")]
    NonManifold(usize, usize, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
