use thiserror::Error;

use crate::model::{PacketId, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("algorithm needs exactly {expected} buffer(s), instance has {found}")]
    BufferCount { expected: usize, found: usize },
    #[error("instance does not have a common deadline")]
    NotCommonDeadline,
    #[error("invalid instance: {}", join(.0))]
    InvalidInstance(Vec<Violation>),
    #[error("unknown packet id {0}")]
    UnknownPacket(PacketId),
    #[error("{what} is {actual}, oracle limit is {limit}")]
    GuardExceeded {
        what: &'static str,
        limit: u64,
        actual: u64,
    },
    #[error("instance has no packets")]
    EmptyInstance,
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
