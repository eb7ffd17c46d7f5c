use thiserror::Error;

/// Which outer robot an error or rule refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum End {
    First,
    Last,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("a chain needs at least {min} robots, got {got}")]
    TooFewRobots { min: usize, got: usize },

    #[error("edge {index} has length {length}, exceeding the viewing range")]
    Disconnected { index: usize, length: f64 },

    #[error("configurations differ in size ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("outer edge at the {end:?} end has zero length (round {round:?})")]
    ZeroOuterEdge { end: End, round: Option<usize> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coincident points: rate of distance change is undefined")]
    CoincidentPoints,

    #[error("eigensolver did not converge for a {dim}x{dim} matrix")]
    NonConvergence { dim: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
