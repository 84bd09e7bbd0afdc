//! Brute-force ground truth for small markets.
//!
//! Every matching is tried, every integer split of every flexible matched
//! pair is tried, and whatever survives the blocking-pair test is kept. None
//! of this shares code with the solver.

use std::cmp::Ordering;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{MarketError, OracleError};
use crate::market::{Instance, Matching, Outcome, PairClass};
use crate::verify::blocks;

pub const MAX_MATCHING_N: usize = 8;
pub const MAX_STABLE_N: usize = 6;

/// All `n!` perfect matchings in lexicographic order of their partner lists.
pub fn enumerate_matchings(n: usize) -> Result<Vec<Matching>, OracleError> {
    if n > MAX_MATCHING_N {
        return Err(OracleError::TooLarge { n, limit: MAX_MATCHING_N });
    }
    Ok((0..n)
        .permutations(n)
        .map(|p| Matching::new(p).expect("a permutation is a matching"))
        .collect())
}

/// Every integer stable outcome of a market, sorted and without duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableSet {
    n: usize,
    outcomes: Vec<Outcome>,
}

impl StableSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn contains(&self, o: &Outcome) -> bool {
        self.outcomes.binary_search(o).is_ok()
    }

    /// Whether some member pays exactly `(u, v)`, whatever its matching.
    pub fn contains_payoff(&self, u: &[i64], v: &[i64]) -> bool {
        self.outcomes.iter().any(|o| o.u == u && o.v == v)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Outcome> {
        self.outcomes.iter()
    }
}

impl<'a> IntoIterator for &'a StableSet {
    type Item = &'a Outcome;
    type IntoIter = std::slice::Iter<'a, Outcome>;

    fn into_iter(self) -> Self::IntoIter {
        self.outcomes.iter()
    }
}

/// Depth-first search over the splits of one matching. Pair `k` is
/// `(k, m[k])`; once it is fixed, all pairs among already fixed agents
/// that involve `p_k` or `q_{m[k]}` are tested for blocking.
struct SplitSearch<'a> {
    inst: &'a Instance,
    m: &'a Matching,
    u: Vec<i64>,
    v: Vec<i64>,
    found: Vec<Outcome>,
}

impl SplitSearch<'_> {
    fn blocked_at(&self, k: usize) -> bool {
        let (inst, m) = (self.inst, self.m);
        let jk = m.partner_of_p(k);
        let fixed_q = |j: usize| m.partner_of_q(j) <= k;
        let pair_blocks = |i: usize, j: usize| match inst.class(i, j) {
            PairClass::Flexible => self.u[i] + self.v[j] < inst.alpha(i, j),
            PairClass::Rigid => self.u[i] < inst.beta(i, j) && self.v[j] < inst.gamma(i, j),
        };
        (0..inst.n()).filter(|&j| fixed_q(j)).any(|j| pair_blocks(k, j))
            || (0..k).any(|i| pair_blocks(i, jk))
    }

    fn run(&mut self, k: usize) {
        let n = self.inst.n();
        if k == n {
            let o = Outcome { matching: self.m.clone(), u: self.u.clone(), v: self.v.clone() };
            debug_assert!((0..n).all(|i| (0..n).all(|j| !blocks(self.inst, &o, i, j))));
            self.found.push(o);
            return;
        }
        let j = self.m.partner_of_p(k);
        let alpha = self.inst.alpha(k, j);
        let splits: Vec<i64> = match self.inst.class(k, j) {
            PairClass::Rigid => vec![self.inst.beta(k, j)],
            PairClass::Flexible => (0..=alpha).collect(),
        };
        for uk in splits {
            self.u[k] = uk;
            self.v[j] = alpha - uk;
            if !self.blocked_at(k) {
                self.run(k + 1);
            }
        }
    }
}

pub fn stable_outcomes(inst: &Instance) -> Result<StableSet, OracleError> {
    let n = inst.n();
    if n > MAX_STABLE_N {
        return Err(OracleError::TooLarge { n, limit: MAX_STABLE_N });
    }
    let matchings = enumerate_matchings(n)?;
    let per_matching: Vec<Vec<Outcome>> = matchings
        .par_iter()
        .map(|m| {
            let mut search = SplitSearch { inst, m, u: vec![0; n], v: vec![0; n], found: Vec::new() };
            search.run(0);
            search.found
        })
        .collect();
    let mut outcomes: Vec<Outcome> = per_matching.into_iter().flatten().collect();
    outcomes.sort();
    outcomes.dedup();
    Ok(StableSet { n, outcomes })
}

/// Verdict of the partial order in which P-agents want more and Q-agents
/// less.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum POrder {
    Greater,
    Less,
    Equal,
    Incomparable,
}

pub fn compare_p(a: &Outcome, b: &Outcome) -> Result<POrder, OracleError> {
    if a.u.len() != b.u.len() || a.v.len() != b.v.len() {
        return Err(MarketError::DimensionMismatch { expected: a.u.len(), found: b.u.len() }.into());
    }
    // Q-payoffs are compared reversed so that "better for P" is always Greater.
    let orders = a.u.iter().zip(&b.u).map(|(x, y)| x.cmp(y)).chain(a.v.iter().zip(&b.v).map(|(x, y)| y.cmp(x)));
    let (mut up, mut down) = (false, false);
    for ord in orders {
        match ord {
            Ordering::Greater => up = true,
            Ordering::Less => down = true,
            Ordering::Equal => {}
        }
    }
    Ok(match (up, down) {
        (false, false) => POrder::Equal,
        (true, false) => POrder::Greater,
        (false, true) => POrder::Less,
        (true, true) => POrder::Incomparable,
    })
}

/// The single member that is at least as good for P as every other member.
pub fn p_optimal(set: &StableSet) -> Result<Outcome, OracleError> {
    if set.is_empty() {
        return Err(OracleError::Empty);
    }
    let dominates_all = |o: &Outcome| {
        set.iter().all(|other| matches!(compare_p(o, other), Ok(POrder::Greater | POrder::Equal)))
    };
    let mut tops = set.iter().filter(|o| dominates_all(o));
    match (tops.next(), tops.next()) {
        (Some(top), None) => Ok(top.clone()),
        _ => Err(OracleError::NotUnique),
    }
}
