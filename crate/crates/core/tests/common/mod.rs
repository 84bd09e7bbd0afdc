#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rifle::cli::{random_instance, GenParams};
use rifle::{Instance, Padded};

pub const RIGID_PROBS: [f64; 4] = [0.0, 0.3, 0.7, 1.0];

fn params(k: usize, sizes: &[usize], max_value: i64, seed: u64) -> GenParams {
    GenParams {
        n: sizes[k % sizes.len()],
        max_value,
        rigid_prob: RIGID_PROBS[(k / sizes.len()) % RIGID_PROBS.len()],
        seed,
    }
}

/// 1000 markets, n in 2..=5, values up to 8.
pub fn existence_suite() -> Vec<Instance> {
    (0..1000).map(|k| random_instance(&params(k, &[2, 3, 4, 5], 8, 20_000 + k as u64)).unwrap()).collect()
}

/// 300 markets, n in 2..=4, values up to 6.
pub fn oracle_suite() -> Vec<Instance> {
    (0..300).map(|k| random_instance(&params(k, &[2, 3, 4], 6, 40_000 + k as u64)).unwrap()).collect()
}

/// 400 two-agent markets drawn like the oracle suite, each padded with
/// reservation prices in 1..=6.
pub fn padded_suite() -> Vec<Padded> {
    (0..400u64)
        .map(|k| {
            let inst = random_instance(&params(k as usize, &[2], 6, 60_000 + k)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(61_000 + k);
            let u_r: Vec<i64> = (0..2).map(|_| rng.gen_range(1..=6)).collect();
            let v_r: Vec<i64> = (0..2).map(|_| rng.gen_range(1..=6)).collect();
            inst.add_reservation_prices(&u_r, &v_r).unwrap()
        })
        .collect()
}

/// Complete strict preference lists for both sides.
pub fn random_profile(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let side = |rng: &mut ChaCha8Rng| {
        (0..n)
            .map(|_| {
                let mut list: Vec<usize> = (0..n).collect();
                list.shuffle(rng);
                list
            })
            .collect::<Vec<_>>()
    };
    let men = side(rng);
    let women = side(rng);
    (men, women)
}

/// Man-proposing deferred acceptance; returns each man's wife.
pub fn deferred_acceptance(men: &[Vec<usize>], women: &[Vec<usize>]) -> Vec<usize> {
    let n = men.len();
    let rank: Vec<Vec<usize>> = women
        .iter()
        .map(|list| {
            let mut r = vec![0; n];
            for (pos, &m) in list.iter().enumerate() {
                r[m] = pos;
            }
            r
        })
        .collect();
    let mut next = vec![0; n];
    let mut husband: Vec<Option<usize>> = vec![None; n];
    let mut free: Vec<usize> = (0..n).rev().collect();
    while let Some(m) = free.pop() {
        let w = men[m][next[m]];
        next[m] += 1;
        match husband[w] {
            None => husband[w] = Some(m),
            Some(h) if rank[w][m] < rank[w][h] => {
                husband[w] = Some(m);
                free.push(h);
            }
            Some(_) => free.push(m),
        }
    }
    let mut wife = vec![0; n];
    for (w, h) in husband.iter().enumerate() {
        wife[h.expect("perfect matching")] = w;
    }
    wife
}
