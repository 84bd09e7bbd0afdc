//! Market instances, matchings and outcomes.
//!
//! A market has `n` agents on each side. Every pair `(p, q)` carries a
//! prescribed split `(beta, gamma)` of its productivity `alpha = beta + gamma`.
//! Rigid agents accept only their prescribed share; flexible agents negotiate.
//! Indices are 0-based throughout the library; files and reports use 1-based
//! indices.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::MarketError;

/// Share a reservation dummy receives when matched to the agent it serves.
///
/// A positive share makes the dummy strictly prefer its owner to everyone
/// else, so the dummy and its owner block any outcome that pays the owner
/// less than the reservation price.
pub const DUMMY_SHARE: i64 = 1;

/// Whether a pair is bound by prescribed shares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairClass {
    Rigid,
    Flexible,
}

/// An agent on either side of the market.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Agent {
    P(usize),
    Q(usize),
}

impl std::fmt::Display for Agent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Agent::P(i) => write!(f, "p{}", i + 1),
            Agent::Q(j) => write!(f, "q{}", j + 1),
        }
    }
}

impl Serialize for Agent {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    n: usize,
    beta: Vec<i64>,
    gamma: Vec<i64>,
    rigid_p: Vec<bool>,
    rigid_q: Vec<bool>,
}

impl Instance {
    /// Builds an instance from square share matrices and rigidity flags.
    pub fn new(
        beta: Vec<Vec<i64>>,
        gamma: Vec<Vec<i64>>,
        rigid_p: Vec<bool>,
        rigid_q: Vec<bool>,
    ) -> Result<Self, MarketError> {
        let n = beta.len();
        if n == 0 {
            return Err(MarketError::Empty);
        }
        if gamma.len() != n || rigid_p.len() != n || rigid_q.len() != n {
            return Err(MarketError::DimensionMismatch {
                expected: n,
                found: gamma.len().max(rigid_p.len()).max(rigid_q.len()),
            });
        }
        let mut flat_beta = Vec::with_capacity(n * n);
        let mut flat_gamma = Vec::with_capacity(n * n);
        for (i, (brow, grow)) in beta.iter().zip(&gamma).enumerate() {
            if brow.len() != n || grow.len() != n {
                return Err(MarketError::NotSquare { row: i, len: brow.len().max(grow.len()) });
            }
            for (j, (&b, &g)) in brow.iter().zip(grow).enumerate() {
                if b < 0 || g < 0 {
                    return Err(MarketError::NegativeValue { p: i, q: j });
                }
                flat_beta.push(b);
                flat_gamma.push(g);
            }
        }
        Ok(Self { n, beta: flat_beta, gamma: flat_gamma, rigid_p, rigid_q })
    }

    /// Pads a rectangular market to a square one with rigid dummies whose
    /// pairs are all worth `(0, 0)`.
    pub fn from_rectangular(
        beta: Vec<Vec<i64>>,
        gamma: Vec<Vec<i64>>,
        rigid_p: Vec<bool>,
        rigid_q: Vec<bool>,
    ) -> Result<Self, MarketError> {
        let np = rigid_p.len();
        let nq = rigid_q.len();
        let n = np.max(nq);
        if beta.len() != np || gamma.len() != np {
            return Err(MarketError::DimensionMismatch { expected: np, found: beta.len() });
        }
        let pad = |m: Vec<Vec<i64>>| -> Result<Vec<Vec<i64>>, MarketError> {
            let mut out = Vec::with_capacity(n);
            for (i, mut row) in m.into_iter().enumerate() {
                if row.len() != nq {
                    return Err(MarketError::NotSquare { row: i, len: row.len() });
                }
                row.resize(n, 0);
                out.push(row);
            }
            out.resize(n, vec![0; n]);
            Ok(out)
        };
        let beta = pad(beta)?;
        let gamma = pad(gamma)?;
        let mut rigid_p = rigid_p;
        let mut rigid_q = rigid_q;
        rigid_p.resize(n, true);
        rigid_q.resize(n, true);
        Self::new(beta, gamma, rigid_p, rigid_q)
    }

    /// Encodes strict preference lists of a marriage market as an all-rigid
    /// instance. A partner of rank `r` (1-based) is worth `n + 1 - r`;
    /// unlisted partners are worth zero.
    pub fn from_marriage(prefs_p: &[Vec<usize>], prefs_q: &[Vec<usize>]) -> Result<Self, MarketError> {
        let n = prefs_p.len();
        if n == 0 {
            return Err(MarketError::Empty);
        }
        if prefs_q.len() != n {
            return Err(MarketError::DimensionMismatch { expected: n, found: prefs_q.len() });
        }
        let encode = |lists: &[Vec<usize>], side: char| -> Result<Vec<Vec<i64>>, MarketError> {
            let mut values = vec![vec![0i64; n]; n];
            for (agent, list) in lists.iter().enumerate() {
                let mut seen = HashSet::new();
                for (rank, &partner) in list.iter().enumerate() {
                    if partner >= n {
                        return Err(MarketError::IndexOutOfRange { index: partner, n });
                    }
                    if !seen.insert(partner) {
                        return Err(MarketError::DuplicatePreference { side, agent, partner });
                    }
                    values[agent][partner] = (n - rank) as i64;
                }
            }
            Ok(values)
        };
        let beta = encode(prefs_p, 'p')?;
        let gamma_t = encode(prefs_q, 'q')?;
        let gamma = (0..n).map(|i| (0..n).map(|j| gamma_t[j][i]).collect()).collect();
        Self::new(beta, gamma, vec![true; n], vec![true; n])
    }

    /// An all-flexible market with the given productivity matrix. The whole
    /// productivity is stored as the P-share; flexible pairs never read the
    /// split.
    pub fn from_assignment(alpha: &[Vec<i64>]) -> Result<Self, MarketError> {
        let n = alpha.len();
        let gamma = vec![vec![0; n]; n];
        Self::new(alpha.to_vec(), gamma, vec![false; n], vec![false; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rigid_p(&self, i: usize) -> bool {
        self.rigid_p[i]
    }

    pub fn rigid_q(&self, j: usize) -> bool {
        self.rigid_q[j]
    }

    pub fn rigid_p_flags(&self) -> &[bool] {
        &self.rigid_p
    }

    pub fn rigid_q_flags(&self) -> &[bool] {
        &self.rigid_q
    }

    /// Prescribed P-share of the pair. Panics on out-of-range indices.
    pub fn beta(&self, i: usize, j: usize) -> i64 {
        self.beta[i * self.n + j]
    }

    /// Prescribed Q-share of the pair. Panics on out-of-range indices.
    pub fn gamma(&self, i: usize, j: usize) -> i64 {
        self.gamma[i * self.n + j]
    }

    /// Productivity `beta + gamma` of the pair. Panics on out-of-range indices.
    pub fn alpha(&self, i: usize, j: usize) -> i64 {
        self.beta(i, j) + self.gamma(i, j)
    }

    /// Checked variant of [`Instance::alpha`].
    pub fn try_alpha(&self, i: usize, j: usize) -> Result<i64, MarketError> {
        self.check_pair(i, j)?;
        Ok(self.alpha(i, j))
    }

    /// Unchecked pair classification. Panics on out-of-range indices.
    pub fn class(&self, i: usize, j: usize) -> PairClass {
        if self.rigid_p[i] || self.rigid_q[j] {
            PairClass::Rigid
        } else {
            PairClass::Flexible
        }
    }

    pub fn pair_class(&self, i: usize, j: usize) -> Result<PairClass, MarketError> {
        self.check_pair(i, j)?;
        Ok(self.class(i, j))
    }

    pub fn is_rigid_pair(&self, i: usize, j: usize) -> bool {
        self.class(i, j) == PairClass::Rigid
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<(), MarketError> {
        for index in [i, j] {
            if index >= self.n {
                return Err(MarketError::IndexOutOfRange { index, n: self.n });
            }
        }
        Ok(())
    }

    /// Sum of productivities over the matched pairs.
    pub fn total_productivity(&self, m: &Matching) -> i64 {
        m.pairs().map(|(i, j)| self.alpha(i, j)).sum()
    }

    pub fn beta_rows(&self) -> Vec<Vec<i64>> {
        self.beta.chunks(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn gamma_rows(&self) -> Vec<Vec<i64>> {
        self.gamma.chunks(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn max_value(&self) -> i64 {
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .map(|(i, j)| self.alpha(i, j))
            .max()
            .unwrap_or(0)
    }

    /// Adds a rigid reservation dummy for every agent.
    ///
    /// The result has `2n` agents per side. Real agents keep their indices;
    /// the dummy Q-agent serving `p_i` sits at Q-index `n + i` and the dummy
    /// P-agent serving `q_j` at P-index `n + j`. A dummy is worth the
    /// reservation price to its owner and nothing to anyone else.
    pub fn add_reservation_prices(&self, u_r: &[i64], v_r: &[i64]) -> Result<Padded, MarketError> {
        let n = self.n;
        if u_r.len() != n || v_r.len() != n {
            return Err(MarketError::DimensionMismatch { expected: n, found: u_r.len().max(v_r.len()) });
        }
        if let Some(index) = u_r.iter().chain(v_r).position(|&x| x < 0) {
            return Err(MarketError::NegativeReservation { index });
        }
        let size = 2 * n;
        let mut beta = vec![vec![0; size]; size];
        let mut gamma = vec![vec![0; size]; size];
        for i in 0..n {
            for j in 0..n {
                beta[i][j] = self.beta(i, j);
                gamma[i][j] = self.gamma(i, j);
            }
            beta[i][n + i] = u_r[i];
            gamma[i][n + i] = DUMMY_SHARE;
        }
        for j in 0..n {
            beta[n + j][j] = DUMMY_SHARE;
            gamma[n + j][j] = v_r[j];
        }
        let mut rigid_p = self.rigid_p.clone();
        let mut rigid_q = self.rigid_q.clone();
        rigid_p.resize(size, true);
        rigid_q.resize(size, true);
        Ok(Padded { instance: Self::new(beta, gamma, rigid_p, rigid_q)?, real: n })
    }
}

/// An instance extended with reservation dummies; see
/// [`Instance::add_reservation_prices`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Padded {
    pub instance: Instance,
    /// Number of real agents per side.
    pub real: usize,
}

impl Padded {
    pub fn is_dummy(&self, agent: Agent) -> bool {
        match agent {
            Agent::P(i) => i >= self.real,
            Agent::Q(j) => j >= self.real,
        }
    }

    /// Whether every real agent that `m` pairs with a dummy gets its own
    /// reservation dummy. Other matchings have no counterpart in the
    /// unpadded market, where an agent is either matched or alone.
    pub fn is_admissible(&self, m: &Matching) -> bool {
        let n = self.real;
        m.pairs().all(|(i, j)| match (i < n, j < n) {
            (true, false) => j == n + i,
            (false, true) => i == n + j,
            _ => true,
        })
    }

    /// Real agents that the matching pairs with a dummy, in canonical order.
    pub fn dummy_matched(&self, m: &Matching) -> Vec<Agent> {
        let mut out: Vec<Agent> = m
            .pairs()
            .filter_map(|(i, j)| match (i < self.real, j < self.real) {
                (true, false) => Some(Agent::P(i)),
                (false, true) => Some(Agent::Q(j)),
                _ => None,
            })
            .collect();
        out.sort();
        out
    }
}

/// A perfect matching, stored as the Q-partner of every P-agent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matching(Vec<usize>);

impl Matching {
    /// Validates that `partners` is a permutation of `0..partners.len()`.
    pub fn new(partners: Vec<usize>) -> Result<Self, MarketError> {
        let n = partners.len();
        let mut seen = vec![false; n];
        for &j in &partners {
            if j >= n {
                return Err(MarketError::IndexOutOfRange { index: j, n });
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(MarketError::NotInjective { q: j });
            }
        }
        Ok(Self(partners))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn partner_of_p(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn partner_of_q(&self, j: usize) -> usize {
        self.0.iter().position(|&x| x == j).expect("matching is a bijection")
    }

    /// Inverse map: the P-partner of every Q-agent.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        inv
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().copied().enumerate()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// 1-based Q-indices in P order, the `[q2, q1, ...]` list form.
    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|j| j + 1).collect()
    }

    pub fn from_one_based(list: &[usize]) -> Result<Self, MarketError> {
        let zero = list
            .iter()
            .map(|&j| j.checked_sub(1).ok_or(MarketError::IndexOutOfRange { index: 0, n: list.len() }))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(zero)
    }
}

/// A matching with payoff vectors. Carries no feasibility guarantee.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome {
    pub matching: Matching,
    pub u: Vec<i64>,
    pub v: Vec<i64>,
}

impl Outcome {
    pub fn new(matching: Matching, u: Vec<i64>, v: Vec<i64>) -> Result<Self, MarketError> {
        let n = matching.len();
        if u.len() != n || v.len() != n {
            return Err(MarketError::DimensionMismatch { expected: n, found: u.len().max(v.len()) });
        }
        Ok(Self { matching, u, v })
    }

    pub fn n(&self) -> usize {
        self.matching.len()
    }

    pub fn payoff(&self, agent: Agent) -> i64 {
        match agent {
            Agent::P(i) => self.u[i],
            Agent::Q(j) => self.v[j],
        }
    }
}
