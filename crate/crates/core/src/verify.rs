//! Feasibility and stability verdicts for outcomes.

use serde::Serialize;

use crate::error::MarketError;
use crate::market::{Agent, Instance, Outcome, PairClass};

/// Stability grade of an outcome, ordered from worst to best.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Verdict {
    Infeasible,
    Feasible,
    Stable,
    StronglyStable,
}

impl Verdict {
    pub fn is_stable(self) -> bool {
        self >= Verdict::Stable
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct FeasibilityReport {
    /// Agents with a negative payoff.
    pub ir_violations: Vec<Agent>,
    /// Matched pairs `(p, q)` that break the rigidity rule.
    pub rigidity_violations: Vec<(usize, usize)>,
    /// `sum(u) + sum(v)` minus the total productivity of the matching.
    pub pareto_gap: i64,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.ir_violations.is_empty() && self.rigidity_violations.is_empty() && self.pareto_gap == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct StabilityReport {
    pub blocking_pairs: Vec<(usize, usize)>,
    pub weak_blocking_pairs: Vec<(usize, usize)>,
    /// Matched pairs whose joint payoff differs from their productivity.
    pub side_payment_pairs: Vec<(usize, usize)>,
}

fn check_dims(inst: &Instance, o: &Outcome) -> Result<(), MarketError> {
    let n = inst.n();
    if o.matching.len() != n || o.u.len() != n || o.v.len() != n {
        return Err(MarketError::DimensionMismatch {
            expected: n,
            found: o.matching.len().max(o.u.len()).max(o.v.len()),
        });
    }
    Ok(())
}

pub fn check_feasibility(inst: &Instance, o: &Outcome) -> Result<FeasibilityReport, MarketError> {
    check_dims(inst, o)?;
    let n = inst.n();
    let mut ir_violations: Vec<Agent> = (0..n).filter(|&i| o.u[i] < 0).map(Agent::P).collect();
    ir_violations.extend((0..n).filter(|&j| o.v[j] < 0).map(Agent::Q));

    let mut rigidity_violations = Vec::new();
    for (i, j) in o.matching.pairs() {
        let (beta, gamma) = (inst.beta(i, j), inst.gamma(i, j));
        let (rp, rq) = (inst.rigid_p(i), inst.rigid_q(j));
        let ok = match (rp, rq) {
            (true, true) => o.u[i] == beta && o.v[j] == gamma,
            (true, false) => o.u[i] == beta && o.v[j] >= gamma,
            (false, true) => o.v[j] == gamma && o.u[i] >= beta,
            (false, false) => true,
        };
        if !ok {
            rigidity_violations.push((i, j));
        }
    }

    let paid: i64 = o.u.iter().sum::<i64>() + o.v.iter().sum::<i64>();
    let pareto_gap = paid - inst.total_productivity(&o.matching);
    Ok(FeasibilityReport { ir_violations, rigidity_violations, pareto_gap })
}

/// Whether `(i, j)` could do better together than under the outcome.
pub fn blocks(inst: &Instance, o: &Outcome, i: usize, j: usize) -> bool {
    match inst.class(i, j) {
        PairClass::Flexible => o.u[i] + o.v[j] < inst.alpha(i, j),
        PairClass::Rigid => o.u[i] < inst.beta(i, j) && o.v[j] < inst.gamma(i, j),
    }
}

/// Every pair, matched or not, that violates its stability inequality.
pub fn blocking_pairs(inst: &Instance, o: &Outcome) -> Vec<(usize, usize)> {
    let n = inst.n();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| blocks(inst, o, i, j))
        .collect()
}

/// Rigid pairs where one member gets exactly its prescribed share from
/// the outcome while the other would strictly gain by pairing up.
pub fn weak_blocking_pairs(inst: &Instance, o: &Outcome) -> Vec<(usize, usize)> {
    let n = inst.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if !inst.is_rigid_pair(i, j) {
                continue;
            }
            let (beta, gamma) = (inst.beta(i, j), inst.gamma(i, j));
            if (o.u[i] == beta && o.v[j] < gamma) || (o.v[j] == gamma && o.u[i] < beta) {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn side_payment_pairs(inst: &Instance, o: &Outcome) -> Vec<(usize, usize)> {
    o.matching.pairs().filter(|&(i, j)| o.u[i] + o.v[j] != inst.alpha(i, j)).collect()
}

pub fn stability_report(inst: &Instance, o: &Outcome) -> Result<StabilityReport, MarketError> {
    check_dims(inst, o)?;
    Ok(StabilityReport {
        blocking_pairs: blocking_pairs(inst, o),
        weak_blocking_pairs: weak_blocking_pairs(inst, o),
        side_payment_pairs: side_payment_pairs(inst, o),
    })
}

/// Highest verdict whose conditions hold. Outcomes of the wrong dimension
/// are infeasible.
pub fn classify(inst: &Instance, o: &Outcome) -> Verdict {
    let Ok(feasibility) = check_feasibility(inst, o) else {
        return Verdict::Infeasible;
    };
    if !feasibility.is_feasible() {
        return Verdict::Infeasible;
    }
    if !blocking_pairs(inst, o).is_empty() {
        return Verdict::Feasible;
    }
    // Feasible and unblocked forces every matched pair to split exactly its productivity.
    assert!(
        side_payment_pairs(inst, o).is_empty(),
        "stable outcome with side payments: {o:?}"
    );
    if weak_blocking_pairs(inst, o).is_empty() {
        Verdict::StronglyStable
    } else {
        Verdict::Stable
    }
}
