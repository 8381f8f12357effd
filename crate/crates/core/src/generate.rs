//! Seeded random instances. Every draw is uniform and independent, and the
//! stream is ChaCha8, so a seed reproduces the same instance everywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Item, ParametricInstance};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub n: usize,
    /// Range for both `a_i` and `b_i`.
    pub coeff: (i64, i64),
    pub profit: (i64, i64),
    pub capacity: (i64, i64),
    pub seed: u64,
}

impl GenParams {
    /// The small family used for oracle comparisons.
    pub fn small(n: usize, seed: u64) -> Self {
        GenParams { n, coeff: (-10, 10), profit: (1, 20), capacity: (0, 50), seed }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, (lo, hi): (i64, i64)| {
            (lo > hi).then(|| Error::InvalidInstance(format!("empty {what} range {lo}..={hi}")))
        };
        if let Some(e) = bad("coefficient", self.coeff).or(bad("profit", self.profit)).or(bad("capacity", self.capacity)) {
            return Err(e);
        }
        if self.profit.0 < 1 {
            return Err(Error::InvalidInstance("profits must be at least 1".into()));
        }
        if self.capacity.0 < 0 {
            return Err(Error::InvalidInstance("capacity must be non-negative".into()));
        }
        Ok(())
    }
}

pub fn generate(params: &GenParams) -> Result<ParametricInstance> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let items = (0..params.n)
        .map(|_| {
            let p = rng.gen_range(params.profit.0..=params.profit.1);
            let a = rng.gen_range(params.coeff.0..=params.coeff.1);
            let b = rng.gen_range(params.coeff.0..=params.coeff.1);
            Item::new(p, a, b)
        })
        .collect();
    let w = rng.gen_range(params.capacity.0..=params.capacity.1);
    ParametricInstance::new(items, w)
}
