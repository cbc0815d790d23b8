use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("range needs {requested} bytes but the memory budget is {budget} bytes")]
    MemoryBudget { requested: u64, budget: u64 },

    #[error("cannot factor {0}: supply the prime factors or use n <= 10^12")]
    FactorizationUnavailable(String),

    #[error("period {0} is too long to scan")]
    PeriodTooLarge(String),

    #[error("enumeration of {0} points exceeds the limit")]
    EnumerationTooLarge(u128),

    #[error("assignment does not cover [1, {y}]: {first_survivor} survives")]
    NotCovering { y: u64, first_survivor: u64 },

    #[error("invalid residue assignment: {0}")]
    InvalidAssignment(String),
}

pub type Result<T> = std::result::Result<T, Error>;
