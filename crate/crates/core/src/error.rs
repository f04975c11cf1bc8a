use alloc::string::String;
use core::fmt;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A group of order zero was requested.
    InvalidOrder,
    /// The multiplication table is not square or references missing elements.
    MalformedTable(String),
    /// Some row or column of the table repeats an element.
    NotLatinSquare { row_or_col: usize },
    /// `(a*b)*c != a*(b*c)` for the recorded triple.
    NotAssociative { a: usize, b: usize, c: usize },
    NoIdentity,
    IndexOutOfRange { index: usize, len: usize },
    AlphabetMismatch { left: usize, right: usize },
    /// Some state's output map is not a permutation of the alphabet.
    NotInvertible { state: usize },
    /// `alphabet^level` exceeds the configured explicit-level budget.
    LevelTooLarge { alphabet: usize, level: usize, cap: u64 },
    /// The continued-fraction recursion for `F_k` divided by zero at step `step`.
    PoleInRecursion { step: usize },
    /// The eigensolver hit its sweep cap.
    NoConvergence { sweeps: usize },
    /// A dense matrix exceeds the eigensolver budget.
    DimensionTooLarge { dim: usize, cap: usize },
    BudgetExceeded(String),
    MissingVariable { var: usize },
    HypothesisNotSatisfied(String),
    Overflow,
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidOrder => write!(f, "invalid group order (must be at least 1)"),
            Error::MalformedTable(why) => write!(f, "malformed multiplication table: {why}"),
            Error::NotLatinSquare { row_or_col } => {
                write!(f, "table is not a latin square (row/column {row_or_col})")
            }
            Error::NotAssociative { a, b, c } => {
                write!(f, "table is not associative at ({a}, {b}, {c})")
            }
            Error::NoIdentity => write!(f, "table has no identity element"),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for size {len}")
            }
            Error::AlphabetMismatch { left, right } => {
                write!(f, "alphabet sizes differ ({left} vs {right})")
            }
            Error::NotInvertible { state } => {
                write!(f, "state {state} does not permute the alphabet")
            }
            Error::LevelTooLarge { alphabet, level, cap } => {
                write!(f, "{alphabet}^{level} exceeds the level budget {cap}")
            }
            Error::PoleInRecursion { step } => {
                write!(f, "F recursion hits a pole at step {step}")
            }
            Error::NoConvergence { sweeps } => {
                write!(f, "eigensolver did not converge within {sweeps} sweeps")
            }
            Error::DimensionTooLarge { dim, cap } => {
                write!(f, "matrix dimension {dim} exceeds the dense budget {cap}")
            }
            Error::BudgetExceeded(what) => write!(f, "budget exceeded: {what}"),
            Error::MissingVariable { var } => write!(f, "no value supplied for t_{var}"),
            Error::HypothesisNotSatisfied(why) => write!(f, "hypothesis not satisfied: {why}"),
            Error::Overflow => write!(f, "integer overflow"),
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
