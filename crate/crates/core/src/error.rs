use std::io;

use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// Negative verdicts ("no encoder", "unservable", budget exhaustion) are
/// values, never errors. Errors are reserved for malformed input and
/// violated preconditions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("position {pos} out of range 1..={len}")]
    PositionOutOfRange { pos: usize, len: usize },

    #[error("data index {index} out of range 1..={k}")]
    IndexOutOfRange { index: usize, k: usize },

    #[error("generator matrix has rank {rank}, expected full row rank {rows}")]
    RankDeficient { rank: usize, rows: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed design: {0}")]
    MalformedDesign(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("construction failed validation: {0}")]
    Construction(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
