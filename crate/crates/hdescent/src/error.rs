use thiserror::Error;

/// Errors raised by constructors and operations across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("incompatible cospan: codomain {0} differs from {1}")]
    IncompatibleCospan(String, String),
    #[error("base mismatch: {0}")]
    BaseMismatch(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error("invalid functor: {0}")]
    InvalidFunctor(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
