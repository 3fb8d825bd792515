use thiserror::Error;

/// Error taxonomy shared by all modules.
///
/// `Input` marks malformed or out-of-range input (parse failures, unknown
/// ids, unknown elements). `Contract` marks violated preconditions on
/// otherwise well-formed input (a named condition fails, a domain lacks a
/// required closure). `Resource` marks an exceeded size budget; it is never
/// silent truncation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("contract error: {0}")]
    Contract(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}
