use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sampler gave up after {0} consecutive rejections")]
    RejectionLimit(u64),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("not implemented: {0}")]
    NotImplemented(String),
}
