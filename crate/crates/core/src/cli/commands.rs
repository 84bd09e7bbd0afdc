use std::fmt::Write as _;

use thiserror::Error;

use super::format::{parse_instance, parse_outcome, write_instance, OutcomeDoc, ParseError};
use super::generate::{random_instance, GenParams};
use super::report::{Diagnostics, LatticeDoc, LatticeFailureDoc, OptimalDoc, ReportDocument, TraceEntry, WitnessDoc};
use crate::analysis::{degeneracy_witness, lattice_failures};
use crate::error::{AnalysisError, MarketError, OracleError, SolverError};
use crate::market::{Instance, Outcome};
use crate::oracle::{p_optimal, stable_outcomes, StableSet};
use crate::solver::{render_values, solve_traced};
use crate::verify::{check_feasibility, classify, stability_report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("invalid flag: {0}")]
    Flag(String),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// A command's JSON report with its human-readable rendering.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub report: ReportDocument,
    pub text: String,
}

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_string(), source })
}

pub fn load_instance(path: &str) -> Result<Instance, CliError> {
    parse_instance(&read(path)?).map_err(|source| CliError::Parse { path: path.to_string(), source })
}

pub fn load_outcome(path: &str) -> Result<Outcome, CliError> {
    parse_outcome(&read(path)?).map_err(|source| CliError::Parse { path: path.to_string(), source })
}

fn outcome_line(o: &Outcome) -> String {
    let m: Vec<String> = o.matching.to_one_based().iter().map(|j| format!("q{j}")).collect();
    format!("mu(P) = [{}]  u = {:?}  v = {:?}", m.join(","), o.u, o.v)
}

fn fill_verdict(report: &mut ReportDocument, text: &mut String, inst: &Instance, o: &Outcome) -> Result<(), CliError> {
    let feasibility = check_feasibility(inst, o)?;
    let stability = stability_report(inst, o)?;
    let verdict = classify(inst, o);
    let diagnostics = Diagnostics::new(&feasibility, &stability);
    let _ = writeln!(text, "{}\nverdict: {verdict:?}", outcome_line(o));
    for (label, pairs) in [("blocking pairs", &diagnostics.blocking_pairs), ("weak blocking pairs", &diagnostics.weak_blocking_pairs)] {
        if !pairs.is_empty() {
            let _ = writeln!(text, "{label}: {pairs:?}");
        }
    }
    if !feasibility.is_feasible() {
        let _ = writeln!(
            text,
            "IR violations: {:?}\nrigidity violations: {:?}\npareto gap: {}",
            diagnostics.ir_violations.iter().map(ToString::to_string).collect::<Vec<_>>(),
            diagnostics.rigidity_violations,
            diagnostics.pareto_gap
        );
    }
    report.outcome = Some(OutcomeDoc::from(o));
    report.verdict = Some(verdict);
    report.diagnostics = Some(diagnostics);
    Ok(())
}

pub fn cmd_solve(inst: &Instance, trace: bool) -> Result<CommandOutput, CliError> {
    let solution = solve_traced(inst)?;
    let mut report = ReportDocument::new("solve", inst);
    let mut text = String::new();
    if trace {
        for t in &solution.trace {
            let _ = writeln!(text, "step {} ({:?})", t.state.step, t.phase);
            text.push_str(&render_values(inst, &t.state));
            text.push('\n');
        }
        report.trace = Some(solution.trace.iter().map(TraceEntry::from).collect());
    }
    fill_verdict(&mut report, &mut text, inst, &solution.outcome)?;
    Ok(CommandOutput { report, text })
}

pub fn cmd_verify(inst: &Instance, outcome: &Outcome) -> Result<CommandOutput, CliError> {
    if outcome.n() != inst.n() {
        return Err(MarketError::DimensionMismatch { expected: inst.n(), found: outcome.n() }.into());
    }
    let mut report = ReportDocument::new("verify", inst);
    let mut text = String::new();
    fill_verdict(&mut report, &mut text, inst, outcome)?;
    Ok(CommandOutput { report, text })
}

fn optimal(set: &StableSet, text: &mut String) -> OptimalDoc {
    match p_optimal(set) {
        Ok(o) => {
            let _ = writeln!(text, "P-optimal: {}", outcome_line(&o));
            OptimalDoc::Unique(OutcomeDoc::from(&o))
        }
        Err(e) => {
            let _ = writeln!(text, "P-optimal: none ({e})");
            OptimalDoc::Missing("NotUnique")
        }
    }
}

pub fn cmd_oracle(inst: &Instance) -> Result<CommandOutput, CliError> {
    let set = stable_outcomes(inst)?;
    let mut report = ReportDocument::new("oracle", inst);
    let mut text = format!("{} stable outcomes\n", set.len());
    for o in &set {
        let _ = writeln!(text, "  {}", outcome_line(o));
    }
    report.p_optimal = Some(optimal(&set, &mut text));
    report.stable_set = Some(set.iter().map(OutcomeDoc::from).collect());
    Ok(CommandOutput { report, text })
}

pub fn cmd_lattice(inst: &Instance) -> Result<CommandOutput, CliError> {
    let set = stable_outcomes(inst)?;
    let failures = lattice_failures(inst, &set);
    let k = set.len();
    let mut report = ReportDocument::new("lattice", inst);
    let mut text = format!("{k} stable outcomes, {} failing join/meet checks\n", failures.len());
    let failures: Vec<LatticeFailureDoc> = failures.iter().map(|f| LatticeFailureDoc::new(f, set.outcomes())).collect();
    for f in &failures {
        let _ = writeln!(text, "  {} of {:?} and {:?}: {}", f.operation, f.first.matching, f.second.matching, f.reason);
    }
    report.p_optimal = Some(optimal(&set, &mut text));
    report.lattice = Some(LatticeDoc { closed: failures.is_empty(), pairs_checked: k * k.saturating_sub(1) / 2, failures });
    Ok(CommandOutput { report, text })
}

pub fn cmd_nondegen(inst: &Instance) -> Result<CommandOutput, CliError> {
    let witness = degeneracy_witness(inst)?;
    let mut report = ReportDocument::new("nondegen", inst);
    let text = match &witness {
        None => "non-degenerate\n".to_string(),
        Some(w) => {
            let members: Vec<String> = w.coalition.iter().map(ToString::to_string).collect();
            format!(
                "degenerate: coalition {{{}}} is forced at {} under both {:?} and {:?}\n",
                members.join(","),
                w.value,
                w.first.to_one_based(),
                w.second.to_one_based()
            )
        }
    };
    report.non_degenerate = Some(witness.is_none());
    report.witness = witness.as_ref().map(WitnessDoc::from);
    Ok(CommandOutput { report, text })
}

pub fn cmd_gen(params: &GenParams) -> Result<String, CliError> {
    random_instance(params).map(|inst| write_instance(&inst)).map_err(CliError::Flag)
}
