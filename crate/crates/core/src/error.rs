use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("operation needs degree at least {needed}, got {got}")]
    DegreeTooLow { needed: usize, got: usize },
    #[error("slot {slot} out of range for a tensor of rank {rank}")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("tensor is not antisymmetric (defect {0:e})")]
    NotAntisymmetric(f64),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("bracket [{i},{j}] must have i < j")]
    BracketOrder { i: usize, j: usize },
    #[error("Jacobi identity fails: d^2 has size {0:e}")]
    Jacobi(f64),
    #[error("dimension {0} is not a positive multiple of 4")]
    NotQuaternionic(usize),
    #[error("quaternionic dimension must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("invalid hypercomplex triple: {0}")]
    InvalidTriple(String),
    #[error("unknown coframe name `{0}`")]
    UnknownName(String),
    #[error("form is not closed (d has size {0:e})")]
    NotClosed(f64),
    #[error("twist precondition violated: {0}")]
    Twist(String),
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
