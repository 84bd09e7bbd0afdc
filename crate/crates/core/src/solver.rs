//! Price-raising auction that finds a stable outcome.
//!
//! Q-agents carry integer prices that only ever go up. Every P-agent proposes
//! to a Q-agent of maximal value at current prices. Three subprocesses drive
//! the proposal map towards a matching:
//!
//! * **A** resolves competing rigid proposals: a Q-agent keeps the rigid
//!   proposer offering it the largest share, sets its price to that share and
//!   bars the other rigid proposers for good.
//! * **B** shifts proposals along augmenting paths of equally good
//!   alternatives, either into a Q-agent with no proposer or onto a rigidly
//!   proposed Q-agent whose rigid proposer is then barred.
//! * **C** raises by one the price of every Q-agent in an over-demanded set
//!   that no augmenting path can relieve.
//!
//! The loop stops as soon as the proposal map is injective.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::SolverError;
use crate::market::{Instance, Matching, Outcome, PairClass};

/// Mutable state of the auction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverState {
    /// Current price of every Q-agent.
    pub prices: Vec<i64>,
    /// Current proposal of every P-agent.
    pub proposal: Vec<Option<usize>>,
    /// Rigid pairs `(p, q)` whose proposal was rejected and may never be renewed.
    pub barred: BTreeSet<(usize, usize)>,
    /// Number of state transitions applied so far.
    pub step: usize,
}

/// Which part of the loop produced a transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Phase {
    Init,
    A,
    /// Augmenting path into a Q-agent without proposers.
    B1,
    /// Augmenting path onto a rigidly proposed Q-agent.
    B2,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Augmentation {
    /// Image of the proposal map grew by one.
    ToUnproposed,
    /// A rigid proposer was displaced and barred.
    ToRigid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub phase: Phase,
    pub state: SolverState,
}

/// Outcome of a solver run together with its transition log.
#[derive(Debug, Clone)]
pub struct Solution {
    pub outcome: Outcome,
    pub trace: Vec<Transition>,
    pub final_state: SolverState,
}

/// The `∼` relation on Q-agents: `q_j ∼ q_k` when some proposer of `q_j`
/// has `q_k` in its demand set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QRelation {
    related: Vec<BTreeSet<usize>>,
    reach: Vec<Vec<bool>>,
}

impl QRelation {
    /// Direct relation, self-loops included.
    pub fn related(&self, j: usize, k: usize) -> bool {
        self.related[j].contains(&k)
    }

    /// Reflexive-transitive closure.
    pub fn connected(&self, j: usize, k: usize) -> bool {
        self.reach[j][k]
    }

    pub fn successors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.related[j].iter().copied()
    }
}

impl SolverState {
    /// All prices zero, nobody proposing.
    pub fn new(n: usize) -> Self {
        Self { prices: vec![0; n], proposal: vec![None; n], barred: BTreeSet::new(), step: 0 }
    }

    pub fn n(&self) -> usize {
        self.prices.len()
    }

    /// What `q_j` is worth to `p_i` at the current price, or `None` if the
    /// pair is rigid and closed: barred, or priced above the Q-share.
    pub fn offer(&self, inst: &Instance, i: usize, j: usize) -> Option<i64> {
        let price = self.prices[j];
        match inst.class(i, j) {
            PairClass::Flexible => Some(inst.alpha(i, j) - price),
            PairClass::Rigid => {
                if self.barred.contains(&(i, j)) || price > inst.gamma(i, j) {
                    None
                } else {
                    Some(inst.beta(i, j))
                }
            }
        }
    }

    /// Value table entry: the offer, with closed rigid pairs shown as zero.
    pub fn value(&self, inst: &Instance, i: usize, j: usize) -> i64 {
        self.offer(inst, i, j).unwrap_or(0)
    }

    /// Q-agents of maximal offer to `p_i`, in index order.
    pub fn demand_set(&self, inst: &Instance, i: usize) -> Vec<usize> {
        let offers: Vec<Option<i64>> = (0..self.n()).map(|j| self.offer(inst, i, j)).collect();
        let Some(best) = offers.iter().flatten().max().copied() else {
            return Vec::new();
        };
        (0..self.n()).filter(|&j| offers[j] == Some(best)).collect()
    }

    pub fn proposers(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.proposal.iter().enumerate().filter(move |(_, p)| **p == Some(j)).map(|(i, _)| i)
    }

    /// The rigid proposer of `q_j`, lowest index first.
    pub fn rigid_proposer(&self, inst: &Instance, j: usize) -> Option<usize> {
        self.proposers(j).find(|&i| inst.is_rigid_pair(i, j))
    }

    /// True when every P-agent proposes and no two share a Q-agent.
    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.n()];
        self.proposal.iter().all(|p| match p {
            Some(j) => !std::mem::replace(&mut seen[*j], true),
            None => false,
        })
    }

    /// Q-agents with at least one proposer.
    pub fn proposed(&self) -> BTreeSet<usize> {
        self.proposal.iter().flatten().copied().collect()
    }

    /// Keeps every proposal that is still of maximal value and moves the
    /// others to the lowest-index member of the demand set.
    pub fn reassign_proposals(&mut self, inst: &Instance) -> Result<(), SolverError> {
        for i in 0..self.n() {
            let demand = self.demand_set(inst, i);
            if self.proposal[i].is_some_and(|j| demand.contains(&j)) {
                continue;
            }
            let &first = demand.first().ok_or(SolverError::EmptyDemand { p: i })?;
            self.proposal[i] = Some(first);
        }
        Ok(())
    }

    /// One round of rigid-proposal resolution followed by reassignment.
    /// Returns whether any price or barred pair changed.
    pub fn rigid_round(&mut self, inst: &Instance) -> Result<bool, SolverError> {
        let mut changed = false;
        for j in 0..self.n() {
            let rigid: Vec<usize> = self.proposers(j).filter(|&i| inst.is_rigid_pair(i, j)).collect();
            let Some(&keep) = rigid.iter().reduce(|best, i| if inst.gamma(*i, j) > inst.gamma(*best, j) { i } else { best })
            else {
                continue;
            };
            let share = inst.gamma(keep, j);
            if self.prices[j] > share {
                return Err(SolverError::PriceDecrease { q: j, from: self.prices[j], to: share });
            }
            if self.prices[j] < share {
                self.prices[j] = share;
                changed = true;
            }
            for &i in rigid.iter().filter(|&&i| i != keep) {
                changed |= self.barred.insert((i, j));
            }
        }
        if changed {
            self.reassign_proposals(inst)?;
        }
        Ok(changed)
    }

    /// Subprocess A: rigid rounds until nothing changes. Returns the number
    /// of rounds that changed the state.
    pub fn subprocess_a(&mut self, inst: &Instance) -> Result<usize, SolverError> {
        let mut rounds = 0;
        while self.rigid_round(inst)? {
            rounds += 1;
        }
        Ok(rounds)
    }

    pub fn q_relation(&self, inst: &Instance) -> QRelation {
        let n = self.n();
        let mut related = vec![BTreeSet::new(); n];
        for i in 0..n {
            if let Some(j) = self.proposal[i] {
                related[j].extend(self.demand_set(inst, i));
            }
        }
        let reach = (0..n)
            .map(|start| {
                let mut seen = vec![false; n];
                seen[start] = true;
                let mut queue = VecDeque::from([start]);
                while let Some(j) = queue.pop_front() {
                    for &k in &related[j] {
                        if !std::mem::replace(&mut seen[k], true) {
                            queue.push_back(k);
                        }
                    }
                }
                seen
            })
            .collect();
        QRelation { related, reach }
    }

    /// Subprocess B: applies one augmenting path if any exists.
    ///
    /// Paths into proposer-less Q-agents are preferred over paths onto
    /// rigidly proposed ones. Sources are tried in index order and each
    /// search is breadth-first, so the shortest path from the lowest-index
    /// over-proposed Q-agent wins.
    pub fn subprocess_b(&mut self, inst: &Instance) -> Result<Option<Augmentation>, SolverError> {
        let n = self.n();
        let demand: Vec<Vec<usize>> = (0..n).map(|i| self.demand_set(inst, i)).collect();
        let proposers: Vec<Vec<usize>> = (0..n).map(|j| self.proposers(j).collect()).collect();
        let rigid: Vec<Option<usize>> = (0..n).map(|j| self.rigid_proposer(inst, j)).collect();
        let sources: Vec<usize> = (0..n).filter(|&j| proposers[j].len() >= 2).collect();

        for kind in [Augmentation::ToUnproposed, Augmentation::ToRigid] {
            let is_target = |k: usize| match kind {
                Augmentation::ToUnproposed => proposers[k].is_empty(),
                Augmentation::ToRigid => rigid[k].is_some(),
            };
            for &source in &sources {
                // parent[k] = (previous Q-agent, proposer that moves from it to k)
                let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
                let mut seen = vec![false; n];
                seen[source] = true;
                let mut queue = VecDeque::from([source]);
                let mut found = None;
                while let Some(k) = queue.pop_front() {
                    if is_target(k) {
                        found = Some(k);
                        break;
                    }
                    for &p in &proposers[k] {
                        for &next in &demand[p] {
                            if !seen[next] {
                                seen[next] = true;
                                parent[next] = Some((k, p));
                                queue.push_back(next);
                            }
                        }
                    }
                }
                let Some(target) = found else { continue };
                let mut node = target;
                while let Some((prev, p)) = parent[node] {
                    self.proposal[p] = Some(node);
                    node = prev;
                }
                if kind == Augmentation::ToRigid {
                    let displaced = rigid[target].expect("target has a rigid proposer");
                    self.proposal[displaced] = None;
                    self.barred.insert((displaced, target));
                }
                self.reassign_proposals(inst)?;
                return Ok(Some(kind));
            }
        }
        Ok(None)
    }

    /// Q-agents reachable from an over-proposed Q-agent that cannot reach
    /// a Q-agent without proposers or with a rigid proposal.
    pub fn over_demanded_set(&self, inst: &Instance) -> BTreeSet<usize> {
        let n = self.n();
        let rel = self.q_relation(inst);
        let counts: Vec<usize> = (0..n).map(|j| self.proposers(j).count()).collect();
        let multi: Vec<usize> = (0..n).filter(|&j| counts[j] >= 2).collect();
        let blocked: Vec<usize> =
            (0..n).filter(|&j| counts[j] == 0 || self.rigid_proposer(inst, j).is_some()).collect();
        (0..n)
            .filter(|&k| multi.iter().any(|&s| rel.connected(s, k)))
            .filter(|&k| !blocked.iter().any(|&b| rel.connected(k, b)))
            .collect()
    }

    /// Subprocess C: raises every price in the over-demanded set by one.
    pub fn subprocess_c(&mut self, inst: &Instance) -> Result<BTreeSet<usize>, SolverError> {
        let raise = self.over_demanded_set(inst);
        if raise.is_empty() {
            return Err(SolverError::NoProgress);
        }
        for &j in &raise {
            self.prices[j] += 1;
        }
        self.reassign_proposals(inst)?;
        Ok(raise)
    }

    /// Payoffs of the final matching. Requires an injective proposal map.
    fn extract(&self, inst: &Instance) -> Outcome {
        let partners: Vec<usize> = self.proposal.iter().map(|p| p.expect("every P-agent proposes")).collect();
        let matching = Matching::new(partners).expect("proposal map is injective");
        let mut u = vec![0; self.n()];
        let mut v = self.prices.clone();
        for (i, j) in matching.pairs() {
            match inst.class(i, j) {
                PairClass::Flexible => u[i] = inst.alpha(i, j) - self.prices[j],
                PairClass::Rigid => {
                    u[i] = inst.beta(i, j);
                    v[j] = inst.gamma(i, j);
                }
            }
        }
        Outcome { matching, u, v }
    }
}

/// Hard cap on the number of transitions of a run.
///
/// A price never exceeds the largest productivity in the market, at most
/// `n²` pairs can be barred and the image of the proposal map grows at most
/// `n` times, and every transition makes one of these kinds of progress.
pub fn step_budget(inst: &Instance) -> usize {
    let n = inst.n();
    let bound = inst.max_value() as usize + 1;
    n * (bound + n * n)
}

struct Driver<'a> {
    inst: &'a Instance,
    state: SolverState,
    budget: usize,
    trace: Vec<Transition>,
}

impl Driver<'_> {
    fn record(&mut self, phase: Phase) -> Result<(), SolverError> {
        if phase != Phase::Init {
            self.state.step += 1;
            if self.state.step > self.budget {
                return Err(SolverError::BudgetExceeded { budget: self.budget });
            }
        }
        self.trace.push(Transition { phase, state: self.state.clone() });
        Ok(())
    }

    fn run(mut self) -> Result<Solution, SolverError> {
        let inst = self.inst;
        self.state.reassign_proposals(inst)?;
        self.record(Phase::Init)?;
        loop {
            while self.state.rigid_round(inst)? {
                self.record(Phase::A)?;
            }
            if self.state.is_injective() {
                break;
            }
            match self.state.subprocess_b(inst)? {
                Some(Augmentation::ToUnproposed) => self.record(Phase::B1)?,
                Some(Augmentation::ToRigid) => self.record(Phase::B2)?,
                None => {
                    self.state.subprocess_c(inst)?;
                    self.record(Phase::C)?;
                }
            }
        }
        Ok(Solution { outcome: self.state.extract(inst), trace: self.trace, final_state: self.state })
    }
}

/// Runs the auction and returns the outcome with the full transition log.
pub fn solve_traced(inst: &Instance) -> Result<Solution, SolverError> {
    Driver { inst, state: SolverState::new(inst.n()), budget: step_budget(inst), trace: Vec::new() }.run()
}

pub fn solve(inst: &Instance) -> Result<Outcome, SolverError> {
    solve_traced(inst).map(|s| s.outcome)
}

/// Value table in the style of a hand-worked auction: one row per P-agent,
/// demand-set entries in brackets, followed by the proposal list.
pub fn render_values(inst: &Instance, state: &SolverState) -> String {
    let n = inst.n();
    let mut out = String::new();
    let _ = write!(out, "{:>5}", "");
    for j in 0..n {
        let _ = write!(out, "{:>7}", format!("q{}", j + 1));
    }
    out.push('\n');
    for i in 0..n {
        let demand = state.demand_set(inst, i);
        let _ = write!(out, "{:>5}", format!("p{}", i + 1));
        for j in 0..n {
            let v = state.value(inst, i, j);
            let cell = if demand.contains(&j) { format!("[{v}]") } else { v.to_string() };
            let _ = write!(out, "{cell:>7}");
        }
        out.push('\n');
    }
    let list: Vec<String> = state
        .proposal
        .iter()
        .map(|p| p.map_or_else(|| "-".to_string(), |j| format!("q{}", j + 1)))
        .collect();
    let prices: Vec<String> = state.prices.iter().map(i64::to_string).collect();
    let _ = writeln!(out, "v = [{}]   mu(P) = [{}]", prices.join(","), list.join(","));
    out
}
