//! JSON report documents. Agents and pairs are written 1-based.

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::format::{write_instance, OutcomeDoc};
use crate::analysis::{LatticeFailure, Witness};
use crate::market::{Agent, Instance};
use crate::solver::{Phase, Transition};
use crate::verify::{FeasibilityReport, StabilityReport, Verdict};

/// SHA-256 of the canonical instance file.
pub fn instance_digest(inst: &Instance) -> String {
    hex::encode(Sha256::digest(write_instance(inst).as_bytes()))
}

fn one_based(pairs: &[(usize, usize)]) -> Vec<[usize; 2]> {
    pairs.iter().map(|&(i, j)| [i + 1, j + 1]).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub blocking_pairs: Vec<[usize; 2]>,
    pub weak_blocking_pairs: Vec<[usize; 2]>,
    pub ir_violations: Vec<Agent>,
    pub rigidity_violations: Vec<[usize; 2]>,
    pub side_payment_pairs: Vec<[usize; 2]>,
    pub pareto_gap: i64,
}

impl Diagnostics {
    pub fn new(feasibility: &FeasibilityReport, stability: &StabilityReport) -> Self {
        Self {
            blocking_pairs: one_based(&stability.blocking_pairs),
            weak_blocking_pairs: one_based(&stability.weak_blocking_pairs),
            ir_violations: feasibility.ir_violations.clone(),
            rigidity_violations: one_based(&feasibility.rigidity_violations),
            side_payment_pairs: one_based(&stability.side_payment_pairs),
            pareto_gap: feasibility.pareto_gap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub step: usize,
    pub phase: Phase,
    pub prices: Vec<i64>,
    /// Q-index each P-agent proposes to, `null` while unassigned.
    pub proposal: Vec<Option<usize>>,
    pub barred: Vec<[usize; 2]>,
}

impl From<&Transition> for TraceEntry {
    fn from(t: &Transition) -> Self {
        let barred: Vec<(usize, usize)> = t.state.barred.iter().copied().collect();
        Self {
            step: t.state.step,
            phase: t.phase,
            prices: t.state.prices.clone(),
            proposal: t.state.proposal.iter().map(|p| p.map(|j| j + 1)).collect(),
            barred: one_based(&barred),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum OptimalDoc {
    Unique(OutcomeDoc),
    Missing(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeDoc {
    pub closed: bool,
    pub pairs_checked: usize,
    pub failures: Vec<LatticeFailureDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeFailureDoc {
    pub operation: &'static str,
    pub first: OutcomeDoc,
    pub second: OutcomeDoc,
    pub reason: String,
}

impl LatticeFailureDoc {
    pub fn new(f: &LatticeFailure, outcomes: &[crate::market::Outcome]) -> Self {
        Self {
            operation: f.operation,
            first: OutcomeDoc::from(&outcomes[f.first]),
            second: OutcomeDoc::from(&outcomes[f.second]),
            reason: f.reason.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessDoc {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub coalition: Vec<Agent>,
    pub value: i64,
}

impl From<&Witness> for WitnessDoc {
    fn from(w: &Witness) -> Self {
        Self {
            first: w.first.to_one_based(),
            second: w.second.to_one_based(),
            coalition: w.coalition.clone(),
            value: w.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportDocument {
    pub command: &'static str,
    pub instance_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<OutcomeDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable_set: Option<Vec<OutcomeDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_optimal: Option<OptimalDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_degenerate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
}

impl ReportDocument {
    pub fn new(command: &'static str, inst: &Instance) -> Self {
        Self {
            command,
            instance_digest: instance_digest(inst),
            outcome: None,
            verdict: None,
            diagnostics: None,
            trace: None,
            stable_set: None,
            p_optimal: None,
            lattice: None,
            non_degenerate: None,
            witness: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
