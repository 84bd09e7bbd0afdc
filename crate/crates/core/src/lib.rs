//! Stable outcomes for two-sided assignment markets mixing rigid and
//! flexible agents.
//!
//! Each side has `n` agents. A pair `(p_i, q_j)` carries shares
//! `beta[i][j]` for the P-agent and `gamma[i][j]` for the Q-agent. A pair
//! with a rigid member must split exactly along those shares, while a pair of
//! flexible agents may divide their joint productivity `alpha = beta + gamma`
//! freely.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod market;
pub mod oracle;
pub mod solver;
pub mod verify;

pub use error::{AnalysisError, MarketError, OracleError, SolverError};
pub use market::{Agent, Instance, Matching, Outcome, PairClass, Padded};
pub use solver::{solve, solve_traced, Solution, SolverState};
pub use verify::{classify, Verdict};
