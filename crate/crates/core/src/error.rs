use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("invalid quantum state: {0}")]
    State(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("strategy violated the game interface: {0}")]
    Strategy(String),
    #[error("trial {trial} aborted: {reason}")]
    Abort { trial: u64, reason: String },
    #[error("malformed encoding: {0}")]
    Decode(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub fn state(msg: impl Into<String>) -> Self {
        Error::State(msg.into())
    }

    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn strategy(msg: impl Into<String>) -> Self {
        Error::Strategy(msg.into())
    }

    pub fn decode(msg: impl Into<String>) -> Self {
        Error::Decode(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
