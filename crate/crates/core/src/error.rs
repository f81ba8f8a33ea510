use thiserror::Error;

use crate::dspan::DSpanError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    DSpan(#[from] DSpanError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid production: {0}")]
    Production(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("non-contiguous output in dimension {0}")]
    NonContiguousOutput(usize),
    #[error("malformed multitree: {0}")]
    Tree(String),
    #[error("estimation diverged: {0}")]
    Diverged(String),
    #[error("empty corpus")]
    EmptyCorpus,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
