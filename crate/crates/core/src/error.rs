use thiserror::Error;

use crate::cc::{Point, Relation};

/// Errors raised by field construction and element arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{d} does not fit in 64 bits")]
    Overflow { p: u64, d: u32 },
    #[error("elements belong to different fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("index {index} does not divide q - 1 = {order}")]
    IndexNotDivisor { index: u64, order: u64 },
    #[error("element set is not a multiplicative subgroup: {0}")]
    NotSubgroup(String),
    #[error("{0}")]
    InvalidElement(String),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
}

/// A violated coherent-configuration axiom, with a witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("color matrix is empty")]
    Empty,
    #[error("color matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("relation indices are not contiguous: {missing} is unused but {max} occurs")]
    NonContiguous { missing: usize, max: usize },
    #[error("relation {relation} occurs on the diagonal at {diagonal} and off the diagonal at {off:?}")]
    DiagonalCollision {
        relation: Relation,
        diagonal: Point,
        off: (Point, Point),
    },
    #[error(
        "coherence violated for (r, s, t) = ({r}, {s}, {t}): pair {first:?} gives {first_count}, pair {second:?} gives {second_count}"
    )]
    NonCoherent {
        r: Relation,
        s: Relation,
        t: Relation,
        first: (Point, Point),
        first_count: usize,
        second: (Point, Point),
        second_count: usize,
    },
    #[error("relation {relation} has no converse: transpose of {pair:?} has relation {found}, expected {expected}")]
    MissingConverse {
        relation: Relation,
        pair: (Point, Point),
        expected: Relation,
        found: Relation,
    },
}

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Axiom(#[from] AxiomError),
    #[error("{what} out of range: {value} (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("configurations have different degrees ({0} vs {1})")]
    DegreeMismatch(usize, usize),
    #[error("{{{0}}} is not a fiber")]
    NotAFiber(Point),
    #[error("budget exceeded: {what} (limit {limit})")]
    BudgetExceeded { what: &'static str, limit: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}, column {col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("dimension error at row {row} (line {line}): {message}")]
    Dimension { row: usize, line: usize, message: String },
    #[error("catalog block {block} (line {line}): {source}")]
    Catalog {
        block: usize,
        line: usize,
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
