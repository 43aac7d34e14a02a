use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("tensor of order {order} over {dim} colours exceeds the dense storage limit")]
    TooLarge { order: usize, dim: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("dictionary has no atoms")]
    EmptyDictionary,

    #[error("invalid dictionary: {0}")]
    InvalidDictionary(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid graphon: {0}")]
    InvalidGraphon(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("vertex of degree {degree} but the model only has tensors up to order {max_order}")]
    DegreeExceedsModel { degree: usize, max_order: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is not orthogonal (max |g^T g - I| = {0:e})")]
    NotOrthogonal(f64),

    #[error("inconsistent decomposition: reconstruction defect {0:e}")]
    InconsistentDecomposition(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
