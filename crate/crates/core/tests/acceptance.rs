//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS or FAIL line; the process exits with a
//! failure status if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rifle::analysis::{degeneracy_witness, join, meet, padded_degeneracy_witness};
use rifle::cli::{random_instance, GenParams};
use rifle::error::AnalysisError;
use rifle::fixtures;
use rifle::market::{Instance, Matching, Outcome};
use rifle::oracle::{compare_p, enumerate_matchings, p_optimal, stable_outcomes, POrder, StableSet};
use rifle::solver::{solve, solve_traced, Phase};
use rifle::verify::{blocking_pairs, check_feasibility, classify, side_payment_pairs, weak_blocking_pairs, Verdict};

/// Wall-clock limit for the worked-example regression.
const TRACE_TIME_LIMIT: Duration = Duration::from_secs(1);
/// Non-degenerate members the oracle suite must contain for criteria 5 and 6
/// to mean anything.
const MIN_NON_DEGENERATE: usize = 50;
/// Non-degenerate padded markets required by criterion 10.
const MIN_PADDED_NON_DEGENERATE: usize = 40;
const MARRIAGE_PROFILES: u64 = 250;
const ASSIGNMENT_MARKETS: u64 = 250;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct OracleCase {
    inst: Instance,
    set: StableSet,
    solved: Outcome,
    non_degenerate: bool,
}

fn oracle_cases() -> &'static [OracleCase] {
    static CASES: OnceLock<Vec<OracleCase>> = OnceLock::new();
    CASES.get_or_init(|| {
        common::oracle_suite()
            .into_iter()
            .map(|inst| OracleCase {
                set: stable_outcomes(&inst).expect("within guard"),
                solved: solve(&inst).expect("solver terminates"),
                non_degenerate: degeneracy_witness(&inst).expect("within guard").is_none(),
                inst,
            })
            .collect()
    })
}

fn show(o: &Outcome) -> String {
    format!("{:?} u={:?} v={:?}", o.matching.to_one_based(), o.u, o.v)
}

fn c1_trace_regression() -> Check {
    let inst = fixtures::five_by_five();
    let start = Instant::now();
    let solution = solve_traced(&inst).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let phases: Vec<Phase> = solution.trace.iter().map(|t| t.phase).collect();
    ensure(phases == [Phase::Init, Phase::A, Phase::A, Phase::C, Phase::C, Phase::B1], || format!("phases {phases:?}"))?;
    let prices: Vec<Vec<i64>> = solution.trace[1..5].iter().map(|t| t.state.prices.clone()).collect();
    let expected = vec![vec![0, 9, 0, 0, 0], vec![5, 9, 0, 0, 0], vec![5, 9, 1, 1, 0], vec![5, 9, 2, 2, 0]];
    ensure(prices == expected, || format!("prices {prices:?}"))?;
    let o = &solution.outcome;
    ensure(o.matching.to_one_based() == [2, 1, 4, 3, 5], || format!("matching {:?}", o.matching.to_one_based()))?;
    ensure(o.u == [9, 8, 11, 8, 7] && o.v == [5, 9, 2, 2, 0], || format!("payoffs {:?} {:?}", o.u, o.v))?;
    ensure(elapsed < TRACE_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("trace and final outcome exact, {elapsed:?}"))
}

fn c2_existence() -> Check {
    let suite = common::existence_suite();
    for (k, inst) in suite.iter().enumerate() {
        let o = solve(inst).map_err(|e| format!("instance {k}: {e}"))?;
        ensure(classify(inst, &o).is_stable(), || format!("instance {k}: {} is {:?}", show(&o), classify(inst, &o)))?;
    }
    Ok(format!("{} instances, all solved to stable outcomes", suite.len()))
}

fn c3_no_side_payments() -> Check {
    let mut checked = 0;
    for (k, inst) in common::existence_suite().iter().enumerate() {
        let o = solve(inst).map_err(|e| e.to_string())?;
        ensure(side_payment_pairs(inst, &o).is_empty(), || format!("existence instance {k}: {}", show(&o)))?;
        checked += 1;
    }
    for (k, case) in oracle_cases().iter().enumerate() {
        for o in case.set.iter().chain([&case.solved]) {
            ensure(classify(&case.inst, o).is_stable(), || format!("oracle instance {k}: unstable member {}", show(o)))?;
            ensure(side_payment_pairs(&case.inst, o).is_empty(), || format!("oracle instance {k}: {}", show(o)))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} stable outcomes split exactly"))
}

fn c4_oracle_membership() -> Check {
    let cases = oracle_cases();
    for (k, case) in cases.iter().enumerate() {
        ensure(!case.set.is_empty(), || format!("instance {k}: empty stable set"))?;
        ensure(case.set.contains(&case.solved), || format!("instance {k}: {} not in stable set", show(&case.solved)))?;
    }
    Ok(format!("{} instances, solver outcome always in the stable set", cases.len()))
}

fn non_degenerate_cases() -> Result<Vec<&'static OracleCase>, String> {
    let nd: Vec<&OracleCase> = oracle_cases().iter().filter(|c| c.non_degenerate).collect();
    ensure(nd.len() >= MIN_NON_DEGENERATE, || format!("only {} non-degenerate instances", nd.len()))?;
    Ok(nd)
}

fn c5_p_optimality() -> Check {
    let nd = non_degenerate_cases()?;
    for (k, case) in nd.iter().enumerate() {
        let best = p_optimal(&case.set).map_err(|e| format!("non-degenerate instance {k}: {e}"))?;
        ensure(best == case.solved, || format!("non-degenerate instance {k}: solver {} vs optimum {}", show(&case.solved), show(&best)))?;
    }
    Ok(format!("{} non-degenerate instances, solver equals the P-optimal outcome", nd.len()))
}

fn at_least(a: &Outcome, b: &Outcome) -> bool {
    matches!(compare_p(a, b), Ok(POrder::Greater | POrder::Equal))
}

fn c6_lattice() -> Check {
    let nd = non_degenerate_cases()?;
    let mut pairs = 0usize;
    for (k, case) in nd.iter().enumerate() {
        let (inst, members) = (&case.inst, case.set.outcomes());
        for (a, x) in members.iter().enumerate() {
            for y in &members[a + 1..] {
                pairs += 1;
                let ctx = || format!("instance {k}, {} and {}", show(x), show(y));
                let up = join(inst, x, y).map_err(|e| format!("{}: join {e}", ctx()))?;
                let down = meet(inst, x, y).map_err(|e| format!("{}: meet {e}", ctx()))?;
                ensure(case.set.contains(&up) && case.set.contains(&down), || format!("{}: result outside set", ctx()))?;
                ensure(at_least(&up, x) && at_least(&up, y), || format!("{}: join is not an upper bound", ctx()))?;
                ensure(at_least(x, &down) && at_least(y, &down), || format!("{}: meet is not a lower bound", ctx()))?;
                for z in members {
                    if at_least(z, x) && at_least(z, y) {
                        ensure(at_least(z, &up), || format!("{}: join not least", ctx()))?;
                    }
                    if at_least(x, z) && at_least(y, z) {
                        ensure(at_least(&down, z), || format!("{}: meet not greatest", ctx()))?;
                    }
                }
            }
        }
        let mut top = members[0].clone();
        for o in &members[1..] {
            top = join(inst, &top, o).map_err(|e| format!("instance {k}: iterated join {e}"))?;
        }
        let best = p_optimal(&case.set).map_err(|e| format!("instance {k}: {e}"))?;
        ensure(top == best, || format!("instance {k}: iterated join {} vs optimum {}", show(&top), show(&best)))?;
    }
    Ok(format!("{} non-degenerate instances, {pairs} pairs closed under exact lub/glb", nd.len()))
}

fn c7_marriage() -> Check {
    for seed in 0..MARRIAGE_PROFILES {
        let mut rng = ChaCha8Rng::seed_from_u64(70_000 + seed);
        let n = rng.gen_range(1..=5);
        let (men, women) = common::random_profile(&mut rng, n);
        let inst = Instance::from_marriage(&men, &women).map_err(|e| e.to_string())?;
        let o = solve(&inst).map_err(|e| e.to_string())?;
        let reference = common::deferred_acceptance(&men, &women);
        ensure(o.matching.as_slice() == reference.as_slice(), || {
            format!("profile {seed}: solver {:?} vs deferred acceptance {reference:?}", o.matching.as_slice())
        })?;
    }
    Ok(format!("{MARRIAGE_PROFILES} profiles, solver equals man-optimal matching"))
}

fn c8_assignment() -> Check {
    for seed in 0..ASSIGNMENT_MARKETS {
        let n = 1 + (seed as usize % 5);
        let inst = random_instance(&GenParams { n, max_value: 9, rigid_prob: 0.0, seed: 80_000 + seed })?;
        let o = solve(&inst).map_err(|e| e.to_string())?;
        let best = enumerate_matchings(n)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|m| inst.total_productivity(m))
            .max()
            .expect("at least one matching");
        let got = inst.total_productivity(&o.matching);
        ensure(got == best, || format!("market {seed}: productivity {got} below maximum {best}"))?;
    }
    Ok(format!("{ASSIGNMENT_MARKETS} all-flexible markets, maximum productivity reached"))
}

fn outcome(m: &[usize], u: &[i64], v: &[i64]) -> Outcome {
    Outcome::new(Matching::from_one_based(m).expect("matching"), u.to_vec(), v.to_vec()).expect("outcome")
}

fn c9_fixed_verdicts() -> Check {
    let first = fixtures::first_example();
    let o = outcome(&[1, 2], &[2, 10], &[4, 5]);
    ensure(blocking_pairs(&first, &o) == [(0, 1)], || format!("first example blocking {:?}", blocking_pairs(&first, &o)))?;

    let strong = fixtures::strong_stability_example();
    let o = outcome(&[1, 2], &[10, 14], &[8, 5]);
    ensure(classify(&strong, &o) == Verdict::Stable, || format!("strong example verdict {:?}", classify(&strong, &o)))?;
    ensure(weak_blocking_pairs(&strong, &o) == [(0, 1)], || "strong example weak blocking".into())?;

    let remark = fixtures::side_payment_remark();
    let o = outcome(&[1, 2], &[5, 8], &[3, 5]);
    let report = check_feasibility(&remark, &o).map_err(|e| e.to_string())?;
    ensure(classify(&remark, &o) == Verdict::Infeasible, || "remark outcome not infeasible".into())?;
    ensure(report.rigidity_violations == [(1, 1)], || format!("remark violations {:?}", report.rigidity_violations))?;

    let degenerate = fixtures::degenerate_example();
    let w = degeneracy_witness(&degenerate).map_err(|e| e.to_string())?.ok_or("degenerate example reported non-degenerate")?;
    ensure(w.value == 11, || format!("witness value {}", w.value))?;
    let a = outcome(&[1, 2], &[4, 6], &[5, 7]);
    let b = outcome(&[2, 1], &[2, 6], &[5, 3]);
    ensure(matches!(join(&degenerate, &a, &b), Err(AnalysisError::NoCompatibleMatching)), || "join found".into())?;
    Ok("blocking, weak blocking, infeasibility and degeneracy verdicts exact".into())
}

fn c10_unmatched_invariance() -> Check {
    let mut qualifying = 0;
    for (k, padded) in common::padded_suite().iter().enumerate() {
        if padded_degeneracy_witness(padded).map_err(|e| e.to_string())?.is_some() {
            continue;
        }
        qualifying += 1;
        let set = stable_outcomes(&padded.instance).map_err(|e| e.to_string())?;
        ensure(!set.is_empty(), || format!("padded market {k}: empty stable set"))?;
        let alone: BTreeSet<_> = set.iter().map(|o| padded.dummy_matched(&o.matching)).collect();
        ensure(alone.len() == 1, || format!("padded market {k}: unmatched sets {alone:?}"))?;
    }
    ensure(qualifying >= MIN_PADDED_NON_DEGENERATE, || format!("only {qualifying} non-degenerate padded markets"))?;
    Ok(format!("{qualifying} non-degenerate padded markets, one unmatched set each"))
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 10] = [
        ("worked auction trace", c1_trace_regression),
        ("existence of stable outcomes", c2_existence),
        ("no side payments", c3_no_side_payments),
        ("oracle cross-check", c4_oracle_membership),
        ("P-optimality", c5_p_optimality),
        ("lattice", c6_lattice),
        ("marriage specialization", c7_marriage),
        ("assignment specialization", c8_assignment),
        ("fixed-example verdicts", c9_fixed_verdicts),
        ("unmatched-set invariance", c10_unmatched_invariance),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.2}s)", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
