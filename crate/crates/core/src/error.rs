use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarketError {
    #[error("market must have at least one agent per side")]
    Empty,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("row {row} has length {len}, matrix must be square")]
    NotSquare { row: usize, len: usize },
    #[error("negative value at pair (p{}, q{})", p + 1, q + 1)]
    NegativeValue { p: usize, q: usize },
    #[error("negative reservation price at position {index}")]
    NegativeReservation { index: usize },
    #[error("index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("q{} is matched twice", q + 1)]
    NotInjective { q: usize },
    #[error("{side}{} lists partner {} more than once", agent + 1, partner + 1)]
    DuplicatePreference { side: char, agent: usize, partner: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("step budget of {budget} transitions exceeded")]
    BudgetExceeded { budget: usize },
    #[error("price of q{} would decrease from {from} to {to}", q + 1)]
    PriceDecrease { q: usize, from: i64, to: i64 },
    #[error("p{} has an empty demand set", p + 1)]
    EmptyDemand { p: usize },
    #[error("no over-demanded set to raise although the proposal map is not injective")]
    NoProgress,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("n = {n} exceeds the enumeration guard of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("stable set is empty")]
    Empty,
    #[error("no unique P-optimal outcome")]
    NotUnique,
    #[error(transparent)]
    Market(#[from] MarketError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("n = {n} exceeds the enumeration guard of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("outcome {which} is not stable")]
    NotStable { which: usize },
    #[error("target payoff is not compatible with any matching")]
    NoCompatibleMatching,
    #[error(transparent)]
    Market(#[from] MarketError),
}
