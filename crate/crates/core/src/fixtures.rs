//! Small markets with known answers, used by tests, the CLI and the README.

use crate::market::Instance;

fn build(rows: &[&[(i64, i64)]], rigid_p: &[bool], rigid_q: &[bool]) -> Instance {
    let beta = rows.iter().map(|r| r.iter().map(|&(b, _)| b).collect()).collect();
    let gamma = rows.iter().map(|r| r.iter().map(|&(_, g)| g).collect()).collect();
    Instance::new(beta, gamma, rigid_p.to_vec(), rigid_q.to_vec()).expect("fixture is well formed")
}

/// Two-by-two market with `p2` and `q2` rigid; identity matching paying
/// `u = (2, 10)`, `v = (4, 5)` is blocked by `(p1, q2)`.
pub fn first_example() -> Instance {
    build(&[&[(3, 3), (3, 6)], &[(2, 5), (10, 5)]], &[false, true], &[false, true])
}

/// Both Q-agents rigid. A side payment from `p2` to `p1` would be stable
/// only if flexible agents could accept less than their share.
pub fn side_payment_remark() -> Instance {
    build(&[&[(3, 3), (4, 6)], &[(1, 1), (10, 5)]], &[false, false], &[true, true])
}

/// Non-degenerate market with a stable outcome that is not strongly stable.
pub fn strong_stability_example() -> Instance {
    build(&[&[(18, 0), (10, 7)], &[(21, 0), (14, 5)]], &[false, false], &[false, true])
}

/// Five-by-five market with `p1`, `p2` and `q1` rigid, used as the solver
/// trace regression.
pub fn five_by_five() -> Instance {
    build(
        &[
            &[(7, 6), (9, 9), (4, 9), (6, 5), (6, 4)],
            &[(8, 5), (9, 9), (3, 5), (7, 7), (2, 5)],
            &[(5, 8), (17, 0), (13, 0), (13, 0), (8, 0)],
            &[(1, 5), (8, 0), (10, 0), (9, 0), (6, 0)],
            &[(1, 6), (12, 0), (8, 0), (9, 0), (7, 0)],
        ],
        &[true, true, false, false, false],
        &[true, false, false, false, false],
    )
}

/// Degenerate market whose two stable outcomes have no join: coalition
/// `{p2, q1}` gets 11 under both matchings.
pub fn degenerate_example() -> Instance {
    build(&[&[(4, 5), (2, 3)], &[(11, 0), (6, 7)]], &[true, false], &[false, true])
}
