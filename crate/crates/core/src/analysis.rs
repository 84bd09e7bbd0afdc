//! Structure of the stable set: forced coalition payoffs, non-degeneracy,
//! the comparison digraph of two stable outcomes and the lattice operations
//! built on it.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::AnalysisError;
use crate::market::{Agent, Instance, Matching, Outcome, Padded};
use crate::oracle::{enumerate_matchings, StableSet};
use crate::verify::classify;

pub const MAX_NONDEGEN_N: usize = 5;
pub const MAX_RECOVERY_N: usize = 6;

/// Coalitions are bitmasks: bit `i` is `p_i`, bit `n + j` is `q_j`.
type Mask = u32;

fn mask_of(n: usize, members: &[Agent]) -> Mask {
    members.iter().fold(0, |acc, a| match *a {
        Agent::P(i) => acc | 1 << i,
        Agent::Q(j) => acc | 1 << (n + j),
    })
}

fn members_of(n: usize, mask: Mask) -> Vec<Agent> {
    let ps = (0..n).filter(|i| mask >> i & 1 == 1).map(Agent::P);
    let qs = (0..n).filter(|j| mask >> (n + j) & 1 == 1).map(Agent::Q);
    ps.chain(qs).collect()
}

fn forced_mask(inst: &Instance, m: &Matching, mask: Mask) -> Option<i64> {
    let n = inst.n();
    let mut total = 0;
    for (i, j) in m.pairs() {
        let p_in = mask >> i & 1 == 1;
        let q_in = mask >> (n + j) & 1 == 1;
        if p_in != q_in && !inst.is_rigid_pair(i, j) {
            return None;
        }
        if p_in {
            total += inst.beta(i, j);
        }
        if q_in {
            total += inst.gamma(i, j);
        }
    }
    Some(total)
}

/// Total payoff that coalition `members` is guaranteed under `m`, provided
/// every matched pair straddling its boundary is rigid. Members' P-shares and
/// Q-shares of their own matched pairs are added up; a flexible pair inside
/// the coalition therefore counts with its full productivity.
pub fn forced_payoff(inst: &Instance, m: &Matching, members: &[Agent]) -> Option<i64> {
    forced_mask(inst, m, mask_of(inst.n(), members))
}

/// Two distinct matchings and a minimal coalition forced under both, at the
/// same value, on which they disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub first: Matching,
    pub second: Matching,
    pub coalition: Vec<Agent>,
    pub value: i64,
}

fn coincide_on(n: usize, a: &Matching, b: &Matching, mask: Mask) -> bool {
    let (ia, ib) = (a.inverse(), b.inverse());
    (0..n).all(|i| mask >> i & 1 == 0 || a.partner_of_p(i) == b.partner_of_p(i))
        && (0..n).all(|j| mask >> (n + j) & 1 == 0 || ia[j] == ib[j])
}

fn forced_both(inst: &Instance, a: &Matching, b: &Matching, mask: Mask) -> Option<(i64, i64)> {
    Some((forced_mask(inst, a, mask)?, forced_mask(inst, b, mask)?))
}

fn is_minimal(inst: &Instance, a: &Matching, b: &Matching, mask: Mask) -> bool {
    let mut sub = (mask - 1) & mask;
    while sub != 0 {
        if forced_both(inst, a, b, sub).is_some() {
            return false;
        }
        sub = (sub - 1) & mask;
    }
    true
}

fn first_witness(inst: &Instance, a: &Matching, b: &Matching, exempt: Mask) -> Option<Witness> {
    let n = inst.n();
    (1..(1 as Mask) << (2 * n))
        .filter(|&mask| mask & !exempt != 0)
        .filter(|&mask| matches!(forced_both(inst, a, b, mask), Some((x, y)) if x == y))
        .filter(|&mask| !coincide_on(n, a, b, mask))
        .find(|&mask| is_minimal(inst, a, b, mask))
        .map(|mask| Witness {
            first: a.clone(),
            second: b.clone(),
            coalition: members_of(n, mask),
            value: forced_mask(inst, a, mask).expect("forced"),
        })
}

fn search_degeneracy(
    inst: &Instance,
    exempt: Mask,
    admissible: impl Fn(&Matching) -> bool + Sync,
) -> Result<Option<Witness>, AnalysisError> {
    let n = inst.n();
    if n > MAX_NONDEGEN_N {
        return Err(AnalysisError::TooLarge { n, limit: MAX_NONDEGEN_N });
    }
    let all: Vec<Matching> = enumerate_matchings(n)
        .map_err(|_| AnalysisError::TooLarge { n, limit: MAX_NONDEGEN_N })?
        .into_iter()
        .filter(|m| admissible(m))
        .collect();
    let found: Vec<Option<Witness>> = (0..all.len())
        .into_par_iter()
        .map(|x| ((x + 1)..all.len()).find_map(|y| first_witness(inst, &all[x], &all[y], exempt)))
        .collect();
    Ok(found.into_iter().flatten().next())
}

/// `None` when the market is non-degenerate, otherwise the first witness in
/// lexicographic order of matchings and coalition masks.
pub fn degeneracy_witness(inst: &Instance) -> Result<Option<Witness>, AnalysisError> {
    search_degeneracy(inst, 0, |_| true)
}

pub fn is_non_degenerate(inst: &Instance) -> Result<bool, AnalysisError> {
    Ok(degeneracy_witness(inst)?.is_none())
}

/// Degeneracy search on a market padded with reservation dummies.
///
/// Only matchings that pair real agents with real partners or with their
/// own dummy are compared, and coalitions made up of dummies alone are
/// ignored. Dummies are worth nothing to anyone but their owner, so without
/// these two restrictions every padded market would look degenerate.
pub fn padded_degeneracy_witness(padded: &Padded) -> Result<Option<Witness>, AnalysisError> {
    let inst = &padded.instance;
    let n = inst.n();
    let dummies: Vec<Agent> = (0..n)
        .map(Agent::P)
        .chain((0..n).map(Agent::Q))
        .filter(|&a| padded.is_dummy(a))
        .collect();
    search_degeneracy(inst, mask_of(n, &dummies), |m| padded.is_admissible(m))
}

/// How an edge of the comparison digraph is directed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Undirected,
    /// The P-endpoint strictly prefers this edge.
    TowardQ,
    /// The Q-endpoint strictly prefers this edge.
    TowardP,
    Bidirected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub p: usize,
    pub q: usize,
    /// `true` for the first outcome's matching, `false` for the second.
    pub first: bool,
    pub direction: Direction,
}

/// Which input matching the P-agents of a component prefer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    First,
    Second,
    Undirected,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    /// Agents in cycle order, starting from the lowest P-agent.
    pub agents: Vec<Agent>,
    pub edges: Vec<Edge>,
    pub orientation: Orientation,
}

impl Component {
    /// A pair matched together in both outcomes.
    pub fn is_two_cycle(&self) -> bool {
        self.agents.len() == 2
    }
}

/// Union of two perfect matchings with edges directed by strict preference.
/// Every component is an alternating cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonDigraph {
    pub components: Vec<Component>,
    pub bidirected: Vec<Edge>,
    /// Edges pointing at an indifferent agent from a flexible partner.
    pub indifferent_preferred_by_flexible: Vec<Edge>,
    /// Components longer than a two-cycle in which nobody has a preference.
    pub indifferent_cycles: Vec<usize>,
}

fn sign(a: i64, b: i64) -> i8 {
    (a - b).signum() as i8
}

pub fn comparison_digraph(inst: &Instance, o1: &Outcome, o2: &Outcome) -> Result<ComparisonDigraph, AnalysisError> {
    for (which, o) in [(1, o1), (2, o2)] {
        if !classify(inst, o).is_stable() {
            return Err(AnalysisError::NotStable { which });
        }
    }
    let n = inst.n();
    let inv2 = o2.matching.inverse();
    // P-preference for the first outcome over the second, and Q-preference likewise.
    let pref_p: Vec<i8> = (0..n).map(|i| sign(o1.u[i], o2.u[i])).collect();
    let pref_q: Vec<i8> = (0..n).map(|j| sign(o1.v[j], o2.v[j])).collect();

    let edge = |p: usize, q: usize, first: bool| {
        let (sp, sq) = if first { (pref_p[p], pref_q[q]) } else { (-pref_p[p], -pref_q[q]) };
        let direction = match (sp > 0, sq > 0) {
            (false, false) => Direction::Undirected,
            (true, false) => Direction::TowardQ,
            (false, true) => Direction::TowardP,
            (true, true) => Direction::Bidirected,
        };
        Edge { p, q, first, direction }
    };

    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let (mut agents, mut edges) = (Vec::new(), Vec::new());
        let mut p = start;
        loop {
            seen[p] = true;
            let q = o1.matching.partner_of_p(p);
            agents.extend([Agent::P(p), Agent::Q(q)]);
            edges.push(edge(p, q, true));
            let next = inv2[q];
            edges.push(edge(next, q, false));
            if next == start {
                break;
            }
            p = next;
        }
        let prefs = agents.iter().map(|a| match *a {
            Agent::P(i) => pref_p[i],
            Agent::Q(j) => -pref_q[j],
        });
        let (up, down) = prefs.fold((false, false), |(u, d), s| (u || s > 0, d || s < 0));
        let orientation = match (up, down) {
            (false, false) => Orientation::Undirected,
            (true, false) => Orientation::First,
            (false, true) => Orientation::Second,
            (true, true) => Orientation::Mixed,
        };
        components.push(Component { agents, edges, orientation });
    }

    let all_edges = components.iter().flat_map(|c| c.edges.iter());
    let bidirected = all_edges.clone().filter(|e| e.direction == Direction::Bidirected).cloned().collect();
    let indifferent_preferred_by_flexible = all_edges
        .filter(|e| !inst.is_rigid_pair(e.p, e.q))
        .filter(|e| {
            (e.direction == Direction::TowardQ && pref_q[e.q] == 0)
                || (e.direction == Direction::TowardP && pref_p[e.p] == 0)
        })
        .cloned()
        .collect();
    let indifferent_cycles = components
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_two_cycle() && c.orientation == Orientation::Undirected)
        .map(|(k, _)| k)
        .collect();
    Ok(ComparisonDigraph { components, bidirected, indifferent_preferred_by_flexible, indifferent_cycles })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Bound {
    Join,
    Meet,
}

fn pair_fits(inst: &Instance, i: usize, j: usize, u: &[i64], v: &[i64]) -> bool {
    u[i] + v[j] == inst.alpha(i, j)
        && (!inst.rigid_p(i) || u[i] == inst.beta(i, j))
        && (!inst.rigid_q(j) || v[j] == inst.gamma(i, j))
}

fn bound(inst: &Instance, o1: &Outcome, o2: &Outcome, which: Bound) -> Result<Outcome, AnalysisError> {
    let graph = comparison_digraph(inst, o1, o2)?;
    let pick = |a: i64, b: i64, more: bool| if more { a.max(b) } else { a.min(b) };
    let favour_p = which == Bound::Join;
    let u: Vec<i64> = o1.u.iter().zip(&o2.u).map(|(&a, &b)| pick(a, b, favour_p)).collect();
    let v: Vec<i64> = o1.v.iter().zip(&o2.v).map(|(&a, &b)| pick(a, b, !favour_p)).collect();

    let mut partners = o1.matching.as_slice().to_vec();
    for c in &graph.components {
        let preferred_first = match (c.orientation, which) {
            (Orientation::First, Bound::Join) | (Orientation::Second, Bound::Meet) => true,
            (Orientation::Second, Bound::Join) | (Orientation::First, Bound::Meet) => false,
            (Orientation::Undirected | Orientation::Mixed, _) => true,
        };
        let fits = |first: bool| c.edges.iter().filter(|e| e.first == first).all(|e| pair_fits(inst, e.p, e.q, &u, &v));
        let Some(first) = [preferred_first, !preferred_first].into_iter().find(|&f| fits(f)) else {
            return Err(AnalysisError::NoCompatibleMatching);
        };
        for e in c.edges.iter().filter(|e| e.first == first) {
            partners[e.p] = e.q;
        }
    }
    let matching = Matching::new(partners)?;
    let assembled = Outcome { matching, u, v };
    if classify(inst, &assembled).is_stable() {
        Ok(assembled)
    } else {
        Err(AnalysisError::NoCompatibleMatching)
    }
}

/// Least upper bound for the P-side: every P-agent gets its better payoff
/// and every Q-agent its worse one.
pub fn join(inst: &Instance, o1: &Outcome, o2: &Outcome) -> Result<Outcome, AnalysisError> {
    bound(inst, o1, o2, Bound::Join)
}

pub fn meet(inst: &Instance, o1: &Outcome, o2: &Outcome) -> Result<Outcome, AnalysisError> {
    bound(inst, o1, o2, Bound::Meet)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PayoffMatch {
    Unique(Matching),
    None,
    Multiple(Vec<Matching>),
}

/// Every matching under which `(u, v)` is a stable outcome.
pub fn matching_from_payoff(inst: &Instance, u: &[i64], v: &[i64]) -> Result<PayoffMatch, AnalysisError> {
    let n = inst.n();
    if n > MAX_RECOVERY_N {
        return Err(AnalysisError::TooLarge { n, limit: MAX_RECOVERY_N });
    }
    let all = enumerate_matchings(n).map_err(|_| AnalysisError::TooLarge { n, limit: MAX_RECOVERY_N })?;
    let mut hits: Vec<Matching> = all
        .into_iter()
        .filter(|m| {
            let o = Outcome { matching: m.clone(), u: u.to_vec(), v: v.to_vec() };
            classify(inst, &o).is_stable()
        })
        .collect();
    Ok(match hits.len() {
        0 => PayoffMatch::None,
        1 => PayoffMatch::Unique(hits.remove(0)),
        _ => PayoffMatch::Multiple(hits),
    })
}

/// A pair of stable outcomes whose join or meet is missing from the set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeFailure {
    pub first: usize,
    pub second: usize,
    pub operation: &'static str,
    pub reason: String,
}

/// Tries join and meet on every pair of members and reports those whose
/// result is not a member.
pub fn lattice_failures(inst: &Instance, set: &StableSet) -> Vec<LatticeFailure> {
    let outcomes = set.outcomes();
    let mut failures = Vec::new();
    for a in 0..outcomes.len() {
        for b in (a + 1)..outcomes.len() {
            for (operation, result) in [
                ("join", join(inst, &outcomes[a], &outcomes[b])),
                ("meet", meet(inst, &outcomes[a], &outcomes[b])),
            ] {
                let reason = match result {
                    Ok(o) if set.contains(&o) => continue,
                    Ok(_) => "result outside the stable set".to_string(),
                    Err(e) => e.to_string(),
                };
                failures.push(LatticeFailure { first: a, second: b, operation, reason });
            }
        }
    }
    failures
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::oracle::stable_outcomes;

    fn outcome(m: &[usize], u: &[i64], v: &[i64]) -> Outcome {
        Outcome::new(Matching::from_one_based(m).unwrap(), u.to_vec(), v.to_vec()).unwrap()
    }

    fn m(list: &[usize]) -> Matching {
        Matching::from_one_based(list).unwrap()
    }

    #[test]
    fn forced_payoff_examples() {
        let inst = fixtures::degenerate_example();
        let c = [Agent::P(1), Agent::Q(0)];
        assert_eq!(forced_payoff(&inst, &m(&[1, 2]), &c), Some(11));
        assert_eq!(forced_payoff(&inst, &m(&[2, 1]), &c), Some(11));
        let flexible = Instance::from_assignment(&[vec![3, 1], vec![1, 3]]).unwrap();
        assert_eq!(forced_payoff(&flexible, &m(&[1, 2]), &[Agent::P(0)]), None);
        assert_eq!(forced_payoff(&flexible, &m(&[1, 2]), &[Agent::P(0), Agent::Q(0)]), Some(3));
    }

    #[test]
    fn degenerate_example_witness() {
        let inst = fixtures::degenerate_example();
        let w = degeneracy_witness(&inst).unwrap().expect("degenerate");
        assert_eq!(w.coalition, vec![Agent::P(1), Agent::Q(0)]);
        assert_eq!(w.value, 11);
        assert_ne!(w.first, w.second);
    }

    #[test]
    fn worked_auction_example_is_degenerate() {
        let w = degeneracy_witness(&fixtures::five_by_five()).unwrap().expect("degenerate");
        assert_eq!(w.coalition, vec![Agent::P(2), Agent::Q(1), Agent::Q(2)]);
        assert_eq!(w.value, 22);
    }

    #[test]
    fn padded_search_skips_dummy_artifacts() {
        let inst = Instance::new(vec![vec![5, 1], vec![2, 6]], vec![vec![1, 3], vec![4, 2]], vec![false; 2], vec![false; 2])
            .unwrap();
        let padded = inst.add_reservation_prices(&[2, 3], &[1, 4]).unwrap();
        assert!(degeneracy_witness(&padded.instance).unwrap().is_some());
        assert_eq!(padded_degeneracy_witness(&padded).unwrap(), None);
    }

    #[test]
    fn strong_stability_example_is_non_degenerate() {
        assert!(is_non_degenerate(&fixtures::strong_stability_example()).unwrap());
    }

    #[test]
    fn single_pair_is_non_degenerate() {
        assert!(is_non_degenerate(&Instance::from_assignment(&[vec![0]]).unwrap()).unwrap());
    }

    #[test]
    fn size_guard() {
        let inst = Instance::from_assignment(&vec![vec![1; 6]; 6]).unwrap();
        assert!(matches!(is_non_degenerate(&inst), Err(AnalysisError::TooLarge { n: 6, limit: 5 })));
    }

    #[test]
    fn identical_outcomes_give_undirected_two_cycles() {
        let inst = fixtures::first_example();
        let o = outcome(&[1, 2], &[4, 10], &[2, 5]);
        let g = comparison_digraph(&inst, &o, &o).unwrap();
        assert_eq!(g.components.len(), 2);
        assert!(g.components.iter().all(|c| c.is_two_cycle() && c.orientation == Orientation::Undirected));
        assert!(g.components.iter().flat_map(|c| &c.edges).all(|e| e.direction == Direction::Undirected));
    }

    #[test]
    fn first_example_digraph_is_one_cycle() {
        let inst = fixtures::first_example();
        let straight = outcome(&[1, 2], &[6, 10], &[0, 5]);
        let crossed = outcome(&[2, 1], &[3, 2], &[5, 6]);
        let g = comparison_digraph(&inst, &straight, &crossed).unwrap();
        assert_eq!(g.components.len(), 1);
        assert_eq!(g.components[0].agents.len(), 4);
        assert_eq!(g.components[0].orientation, Orientation::First);
        assert!(g.bidirected.is_empty());
    }

    #[test]
    fn digraph_rejects_unstable_input() {
        let inst = fixtures::first_example();
        let bad = outcome(&[1, 2], &[2, 10], &[4, 5]);
        let good = outcome(&[1, 2], &[6, 10], &[0, 5]);
        assert!(matches!(comparison_digraph(&inst, &good, &bad), Err(AnalysisError::NotStable { which: 2 })));
    }

    #[test]
    fn degenerate_example_digraph_follows_the_matchings() {
        let inst = fixtures::degenerate_example();
        let set = stable_outcomes(&inst).unwrap();
        let a = set.iter().find(|o| o.matching == m(&[1, 2])).unwrap();
        let b = set.iter().find(|o| o.matching == m(&[2, 1])).unwrap();
        let g = comparison_digraph(&inst, a, b).unwrap();
        assert_eq!(g.components.len(), 1);
        assert_eq!(g.components[0].edges.len(), 4);
    }

    #[test]
    fn join_and_meet_are_idempotent() {
        let inst = fixtures::five_by_five();
        let o = crate::solver::solve(&inst).unwrap();
        assert_eq!(join(&inst, &o, &o).unwrap(), o);
        assert_eq!(meet(&inst, &o, &o).unwrap(), o);
    }

    #[test]
    fn same_matching_join_and_meet_are_componentwise() {
        let inst = fixtures::first_example();
        let a = outcome(&[1, 2], &[3, 10], &[3, 5]);
        let b = outcome(&[1, 2], &[5, 10], &[1, 5]);
        assert_eq!(join(&inst, &a, &b).unwrap(), b);
        assert_eq!(meet(&inst, &a, &b).unwrap(), a);
    }

    #[test]
    fn degenerate_example_has_no_join_or_meet() {
        let inst = fixtures::degenerate_example();
        let a = outcome(&[1, 2], &[4, 6], &[5, 7]);
        let b = outcome(&[2, 1], &[2, 6], &[5, 3]);
        assert!(classify(&inst, &a).is_stable() && classify(&inst, &b).is_stable());
        assert!(matches!(join(&inst, &a, &b), Err(AnalysisError::NoCompatibleMatching)));
        assert!(matches!(meet(&inst, &a, &b), Err(AnalysisError::NoCompatibleMatching)));
    }

    #[test]
    fn payoff_recovery() {
        let inst = fixtures::five_by_five();
        let found = matching_from_payoff(&inst, &[9, 8, 11, 8, 7], &[5, 9, 2, 2, 0]).unwrap();
        assert_eq!(found, PayoffMatch::Unique(m(&[2, 1, 4, 3, 5])));
        assert_eq!(matching_from_payoff(&inst, &[-1, 8, 11, 8, 7], &[5, 9, 2, 2, 0]).unwrap(), PayoffMatch::None);
    }

    #[test]
    fn tied_rigid_market_recovers_several_matchings() {
        let ones = vec![vec![1, 1], vec![1, 1]];
        let inst = Instance::new(ones.clone(), ones, vec![true, true], vec![true, true]).unwrap();
        assert!(!is_non_degenerate(&inst).unwrap());
        let found = matching_from_payoff(&inst, &[1, 1], &[1, 1]).unwrap();
        assert_eq!(found, PayoffMatch::Multiple(vec![m(&[1, 2]), m(&[2, 1])]));
    }
}
