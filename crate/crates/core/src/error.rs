use thiserror::Error;

/// Errors shared across the crate.
///
/// `TruncationTooSmall` is the one recoverable condition: it signals that a
/// word-length or stage bound must be raised before the requested quotient
/// can be certified exact.
#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("not a cocycle: {0}")]
    NotACocycle(String),

    #[error("no connection: {0}")]
    NoConnection(String),

    #[error("algebra is not quasi-free: {0}")]
    NotQuasiFree(String),

    #[error("map is not a section: {0}")]
    NotASection(String),

    #[error("map is not a retraction: {0}")]
    NotARetraction(String),

    #[error("degree overflow: {0}")]
    DegreeOverflow(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
