use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty set")]
    EmptySet,
    #[error("duplicate point id {0}")]
    DuplicateId(u32),
    #[error("point set is not in general position")]
    NotGeneralPosition,
    #[error("{n} points exceed the exact limit of {limit}; use estimate")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no subrays to remove (n = {0}, need n >= 9)")]
    NoSubrays(usize),
    #[error("point ids of the set and the construction tree differ")]
    IdMismatch,
    #[error("construction failed validation after {retries} retries: {diagnostics:?}")]
    ValidationFailed {
        retries: u32,
        diagnostics: Vec<String>,
    },
    #[error("undecided at the available precision: {0}")]
    Undecided(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
