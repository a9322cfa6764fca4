use thiserror::Error;

use crate::instance::InstanceViolation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(#[from] InstanceViolation),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("tenant id {0} out of range")]
    TenantOutOfRange(usize),

    #[error("room id {0} out of range")]
    RoomOutOfRange(usize),

    #[error("rooming group has {0} members, at most 2 allowed")]
    GroupTooLarge(usize),

    #[error("expected {expected} prices, got {got}")]
    PriceLength { expected: usize, got: usize },

    #[error("matrix is not square ({rows} rows, row {row} has {cols} columns)")]
    NotSquare {
        rows: usize,
        row: usize,
        cols: usize,
    },

    #[error("non-finite weight in row {0}")]
    NonFiniteWeight(usize),

    #[error("enumeration would visit {count} assignments, cap is {cap}")]
    EnumerationCap { count: String, cap: u64 },

    #[error("vertex set is not decodable: {0}")]
    NotDecodable(String),

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    #[error("simplex did not converge within {0} pivots")]
    LpIterationLimit(usize),

    #[error("room envy-free prices do not exist for this assignment (rooms are not welfare-optimal for its groups)")]
    RefInfeasible,

    #[error("no feasible epsilon found up to {cap}")]
    UnboundedEnvy { cap: f64 },

    #[error("solver timed out after {0:.1} s")]
    Timeout(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
