use thiserror::Error;

use crate::matroid::ElementSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("element {element} is out of range for a ground set of size {ground_size}")]
    ElementOutOfRange { element: usize, ground_size: usize },

    #[error("ground set of size {0} exceeds the supported maximum of 64 elements")]
    GroundSetTooLarge(usize),

    #[error("invalid matroid description: {0}")]
    InvalidMatroid(String),

    #[error("{0} is not a flat")]
    NotAFlat(ElementSet),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("element {0} is a loop")]
    LoopsPresent(usize),

    #[error("{line} has rank {rank}, lines must have rank 1 or 2")]
    NotALine { line: ElementSet, rank: usize },

    #[error("{what} budget of {cap} exceeded")]
    BudgetExceeded { what: &'static str, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular")]
    Singular,

    #[error("no perfect fractional matching")]
    NoPerfectMatching,

    #[error("weight of line {0} is negative")]
    NegativeWeight(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
