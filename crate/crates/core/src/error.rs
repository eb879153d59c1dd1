use thiserror::Error;

use crate::treewidth::TdError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(usize, usize),
    #[error("arc ({0}, {1}) has weight 0")]
    ZeroWeight(usize, usize),
    #[error("not a DAG: the arc relation contains a cycle")]
    NotADag,
    #[error("total arc weight overflows 64 bits")]
    WeightOverflow,
    #[error("unknown arc id {0}")]
    UnknownArc(usize),
    #[error("arc set is not a partitioning set")]
    NotPartitioning,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Decomposition(#[from] TdError),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
