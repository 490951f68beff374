use thiserror::Error;

use crate::model::{AgentId, Mode, Triple};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("agent {id} out of range for an instance of {n} agents")]
    InvalidAgent { id: AgentId, n: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("operation requires a {expected} instance, got {found}")]
    WrongMode { expected: Mode, found: Mode },

    #[error("instance is not triangle-free: {0} is a triangle")]
    NotTriangleFree(Triple),

    #[error("matching is not a P-matching: agent {0} is matched with utility zero")]
    NotPMatching(AgentId),

    #[error("matching is not repairable")]
    NotRepairable,

    #[error("repair invariant violated: {0}")]
    RepairInvariant(String),

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("instance admits no stable matching")]
    NoStableMatching,

    #[error("invalid PIT input: {0}")]
    InvalidPit(String),

    #[error("matching does not have the structure of a stable matching of the reduction: {0}")]
    DecodeStructure(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("generator: {0}")]
    Generator(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
