//! Crate-wide error type.

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("singular matrix: rank {rank}, kernel vector attached")]
    Singular { rank: usize, kernel: Vec<Scalar> },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("inadmissible index: {0}")]
    InadmissibleIndex(String),

    #[error("series base must have constant term 1")]
    NonUnitConstantTerm,

    #[error("exponent must be a half-integer")]
    BadExponent,

    #[error("constraint system is infeasible: {0}")]
    Infeasible(String),

    #[error("tensor is not cocommutative; left and right module actions disagree")]
    NotCocommutative,

    #[error("invalid serialized data: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
