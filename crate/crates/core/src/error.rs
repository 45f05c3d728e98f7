use thiserror::Error;

use crate::interval::Interval;
use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("matrix has no cycle columns")]
    EmptyCycle,
    #[error("column {column} is empty")]
    EmptyColumn { column: usize },
    #[error("column {column}: entry q[{index}] = {value} is not positive")]
    NonPositiveEntry { column: usize, index: usize, value: Rational },
    #[error("column {column} sums to {sum}, not 1")]
    ColumnSumNotOne { column: usize, sum: Rational },
    #[error("product of column maxima over one cycle is {max_product}; infinite digit products would not vanish")]
    Property3Violated { max_product: Rational },
    #[error("cycle column {column} has a single digit; infinite digit products would not vanish")]
    SingleDigitCycleColumn { column: usize },

    #[error("digit {digit} at position {position} exceeds column alphabet 0..={max}")]
    DigitOutOfRange { position: usize, digit: usize, max: usize },
    #[error("tail digit {digit} lands on position {position} whose alphabet is only 0..={max}")]
    MisalignedTail { position: usize, digit: usize, max: usize },
    #[error("digit stream has an empty tail cycle")]
    EmptyTail,

    #[error("{x} lies outside the representable range {range}")]
    OutOfRange { x: Rational, range: Box<Interval> },
    #[error("no rank-{rank} cylinder contains the point; it falls in the gap {gap}")]
    GapHit { rank: usize, gap: Box<Interval> },
    #[error("cannot shift {k} digits off a word of length {len}")]
    ShiftTooLong { k: usize, len: usize },
    #[error("last digit of the base must be nonzero")]
    ZeroLastDigit,
    #[error("base word must be nonempty")]
    EmptyBase,
    #[error("base {base} is invalid; need at least 2")]
    BadBase { base: u64 },
    #[error("enumeration of {count} cylinders exceeds the cap of {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },
}

impl Error {
    /// True for malformed input text, as opposed to well-formed input that
    /// fails a mathematical condition.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }
}
