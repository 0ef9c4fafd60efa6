//! Monte-Carlo estimation of collision probabilities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::grid::SchemeParams;
use crate::mix::derive_seed;
use crate::scheme::SchemeInstance;

const CHUNK: u64 = 8192;

/// Outcome of a collision experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollisionEstimate {
    pub collisions: u64,
    pub trials: u64,
}

impl CollisionEstimate {
    pub fn rate(&self) -> f64 {
        self.collisions as f64 / self.trials as f64
    }

    /// Two-sided Hoeffding half-width at confidence `1 - alpha`:
    /// `sqrt(ln(2 / alpha) / (2 n))`.
    pub fn hoeffding_half_width(&self, alpha: f64) -> f64 {
        ((2.0 / alpha).ln() / (2.0 * self.trials as f64)).sqrt()
    }

    /// Half-width at 99% confidence.
    pub fn half_width(&self) -> f64 {
        self.hoeffding_half_width(0.01)
    }

    /// Standard error of a binomial rate with success probability `p`.
    pub fn standard_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Estimates `Pr[g(P) = g'(Q)]` by resampling all of the scheme's randomness
/// (shared and private) in every trial. `P` is hashed as an input curve and
/// `Q` as a query. Trials run in parallel; the result depends only on the
/// state of `rng`.
pub fn estimate_collision_probability<R: Rng + ?Sized>(
    params: &SchemeParams,
    p: &Curve,
    q: &Curve,
    trials: u64,
    rng: &mut R,
) -> Result<CollisionEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    // Surface parameter and dimension errors before the parallel loop.
    let probe = SchemeInstance::from_seed(params, 0)?;
    probe.hash_input(p, rng)?;
    probe.hash_query(q, rng)?;
    let master: u64 = rng.random();
    let chunks = trials.div_ceil(CHUNK);
    let collisions = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<u64> {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master, &[chunk]));
            let n = CHUNK.min(trials - chunk * CHUNK);
            let mut hits = 0;
            for _ in 0..n {
                let instance = SchemeInstance::sample(params, &mut rng)?;
                if instance.hash_input(p, &mut rng)? == instance.hash_query(q, &mut rng)? {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(CollisionEstimate { collisions, trials })
}
