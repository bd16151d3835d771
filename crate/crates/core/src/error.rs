use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("{0} is not a prime in [2, 2^31)")]
    NotPrime(u64),

    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("field mismatch: expected {expected}, found {found}")]
    FieldMismatch { expected: String, found: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not alternating")]
    NotAlternating,

    #[error("matrix is singular")]
    Singular,

    #[error("basis is linearly dependent")]
    DependentBasis,

    #[error("enumeration of {required} items exceeds the budget of {budget}")]
    BudgetExceeded { required: String, budget: u64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("operation requires a finite field")]
    InfiniteField,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
