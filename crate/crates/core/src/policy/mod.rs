//! Bandit policies behind a single act/observe interface.
//!
//! Arms are indexed `0..num_arms`. Every policy draws its randomness from the
//! stream passed to [`Policy::select_action`], so a policy's decisions are a
//! pure function of its observations and that stream.

mod active_ptw;
mod config;
mod klucb;
mod master;
mod simple;
mod thompson;
mod ucb;

pub use active_ptw::{ActivePtwPolicy, ReferencePolicy};
pub use config::{AlgorithmSpec, BuildContext};
pub use klucb::{bernoulli_kl, klucb_index, KlUcbPolicy};
pub use master::{MasterConfig, MasterLog, MasterUcb1Policy};
pub use simple::{ConstantPolicy, UniformPolicy};
pub use thompson::ThompsonPolicy;
pub use ucb::{SlidingWindowUcbPolicy, Ucb1Policy};

use rand::{Rng, RngCore};

use crate::error::{Error, Result};

pub trait Policy: Send {
    fn name(&self) -> String;

    fn num_arms(&self) -> usize;

    /// Number of steps the policy can handle, if bounded.
    fn horizon(&self) -> Option<u64> {
        None
    }

    /// Choose the arm to pull at the next time step.
    fn select_action(&mut self, rng: &mut dyn RngCore) -> Result<usize>;

    /// Record the percept received for `arm`.
    fn observe(&mut self, arm: usize, percept: bool) -> Result<()>;

    /// Forget all observations.
    fn reset(&mut self);
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn num_arms(&self) -> usize {
        (**self).num_arms()
    }
    fn horizon(&self) -> Option<u64> {
        (**self).horizon()
    }
    fn select_action(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        (**self).select_action(rng)
    }
    fn observe(&mut self, arm: usize, percept: bool) -> Result<()> {
        (**self).observe(arm, percept)
    }
    fn reset(&mut self) {
        (**self).reset()
    }
}

/// Index of the largest value; exact ties are broken uniformly at random.
/// Randomness is only consumed when a tie actually occurs.
pub(crate) fn argmax_uniform_ties(values: &[f64], rng: &mut dyn RngCore) -> usize {
    let mut best = 0;
    let mut ties = 1usize;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
            ties = 1;
        } else if v == values[best] {
            ties += 1;
        }
    }
    if ties == 1 {
        return best;
    }
    let pick = rng.random_range(0..ties);
    let top = values[best];
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == top)
        .nth(pick)
        .map(|(i, _)| i)
        .unwrap_or(best)
}

pub(crate) fn check_arm(arm: usize, num_arms: usize) -> Result<()> {
    if arm >= num_arms {
        Err(Error::InvalidArm { arm, num_arms })
    } else {
        Ok(())
    }
}

pub(crate) fn check_num_arms(num_arms: usize) -> Result<()> {
    if num_arms == 0 {
        Err(Error::InvalidParameter("num_arms must be >= 1".into()))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn argmax_unique_consumes_nothing() {
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let b = a.clone();
        assert_eq!(argmax_uniform_ties(&[0.1, 0.7, 0.3], &mut a), 1);
        assert_eq!(a, b);
    }

    #[test]
    fn argmax_ties_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut counts = [0usize; 4];
        let n = 30_000;
        for _ in 0..n {
            counts[argmax_uniform_ties(&[0.5, 0.2, 0.5, 0.5], &mut rng)] += 1;
        }
        assert_eq!(counts[1], 0);
        for &c in &[counts[0], counts[2], counts[3]] {
            let p = 1.0 / 3.0;
            let sd = (n as f64 * p * (1.0 - p)).sqrt();
            assert!((c as f64 - n as f64 * p).abs() < 3.0 * sd, "{counts:?}");
        }
    }
}
