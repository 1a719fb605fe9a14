use thiserror::Error;

/// Errors raised by the numerical routines and constructors in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input failed a structural invariant (Hermitian, stochastic, dimension).
    #[error("validation failed: {0}")]
    Validation(String),

    /// A scalar parameter is outside its mathematical domain.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// The request is well-formed but outside what this crate supports.
    #[error("unsupported: {0}")]
    Capability(String),

    /// An operator expected to be positive semidefinite has a negative eigenvalue.
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    /// A precondition on a mechanism (such as its privacy level) does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A numerical routine failed to converge or to produce a usable result.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
