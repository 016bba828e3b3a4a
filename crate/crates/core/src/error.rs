use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("aiger: {0}")]
    Parse(String),

    #[error("aiger: sequential designs are not supported ({0} latches)")]
    Latches(usize),

    #[error("invalid argument: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("stale plan: built against graph version {plan}, graph is at {graph}")]
    StalePlan { plan: u64, graph: u64 },

    #[error("equivalence check: {0}")]
    Equivalence(String),

    #[error("model file: {0}")]
    Model(String),

    #[error("non-finite activation in {0}")]
    NonFinite(&'static str),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
