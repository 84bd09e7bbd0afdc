use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::market::Instance;

/// Parameters of a random market. The same parameters always give the same
/// market, on every platform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub n: usize,
    pub max_value: i64,
    pub rigid_prob: f64,
    pub seed: u64,
}

impl GenParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.n == 0 {
            return Err("--n must be at least 1".into());
        }
        if self.max_value < 0 {
            return Err("--max-value must be nonnegative".into());
        }
        if !(0.0..=1.0).contains(&self.rigid_prob) {
            return Err("--rigid-prob must lie in [0, 1]".into());
        }
        Ok(())
    }
}

/// Draws rigidity flags for P then Q, then `(beta, gamma)` row by row.
pub fn random_instance(params: &GenParams) -> Result<Instance, String> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n;
    let rigid_p: Vec<bool> = (0..n).map(|_| rng.gen_bool(params.rigid_prob)).collect();
    let rigid_q: Vec<bool> = (0..n).map(|_| rng.gen_bool(params.rigid_prob)).collect();
    let mut beta = vec![vec![0; n]; n];
    let mut gamma = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            beta[i][j] = rng.gen_range(0..=params.max_value);
            gamma[i][j] = rng.gen_range(0..=params.max_value);
        }
    }
    Instance::new(beta, gamma, rigid_p, rigid_q).map_err(|e| e.to_string())
}
