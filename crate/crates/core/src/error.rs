use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("no integral solution")]
    NoSolution,
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("{0} is not a unit modulo {1}")]
    NotAUnit(String, String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("operands live in different groups")]
    GroupMismatch,
    #[error("chain map check failed: {0}")]
    ChainMapFailure(String),
    #[error("no chain map lift: {0}")]
    NoLift(String),
    #[error("not an automorphism: {0}")]
    NotAnAutomorphism(String),
    #[error("basis error: {0}")]
    BasisError(String),
    #[error("matrix is not invertible over the ring")]
    NotInvertible,
    #[error("no symmetrisation: entry ({0}, {1}) obstructs")]
    NoSymmetrisation(usize, usize),
    #[error("form mismatch: {0}")]
    FormMismatch(String),
    #[error("isometry is not diagonal: {0}")]
    NotDiagonal(String),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("not found: {0}")]
    NotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
