use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid code configuration: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("frozen bit u_{0} is nonzero")]
    FrozenViolation(usize),
    #[error("argument outside the function domain: {0}")]
    Domain(String),
    #[error("frozen mask has no unfrozen bits")]
    EmptyPartition,
    #[error("candidate u_{0} has zero mean LLR and cannot be ranked")]
    ZeroMean(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
