use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A quantity that must be inverted is (numerically) zero.
    #[error("singular value: {0}")]
    Singular(String),

    /// A point lies outside the domain of the operation (usually the open unit ball).
    #[error("domain error: {0}")]
    Domain(String),

    /// A documented precondition on the arguments does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An iterative conversion failed to converge.
    #[error("conversion failed: {0}")]
    Conversion(String),

    /// Input data does not satisfy the invariant of its type.
    #[error("validation failed: {0}")]
    Validation(String),
}
