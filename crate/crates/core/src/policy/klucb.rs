use rand::RngCore;

use super::{argmax_uniform_ties, check_arm, check_num_arms, Policy};
use crate::error::Result;

pub const BISECTION_TOL: f64 = 1e-9;

/// Bernoulli KL divergence `KL(p || q)` in nats.
pub fn bernoulli_kl(p: f64, q: f64) -> f64 {
    fn term(a: f64, b: f64) -> f64 {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a * (a / b).ln()
        }
    }
    term(p, q) + term(1.0 - p, 1.0 - q)
}

/// Largest `q in [mean, 1]` with `pulls · KL(mean || q) <= budget`, found by
/// bisection to [`BISECTION_TOL`].
pub fn klucb_index(mean: f64, pulls: u64, budget: f64) -> f64 {
    if mean >= 1.0 {
        return 1.0;
    }
    let n = pulls as f64;
    let (mut lo, mut hi) = (mean, 1.0);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if n * bernoulli_kl(mean, mid) <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// KL-UCB for Bernoulli rewards with exploration budget `ln t`.
#[derive(Debug, Clone)]
pub struct KlUcbPolicy {
    successes: Vec<u64>,
    pulls: Vec<u64>,
    t: u64,
    scratch: Vec<f64>,
}

impl KlUcbPolicy {
    pub fn new(num_arms: usize) -> Result<Self> {
        check_num_arms(num_arms)?;
        Ok(Self {
            successes: vec![0; num_arms],
            pulls: vec![0; num_arms],
            t: 0,
            scratch: Vec::with_capacity(num_arms),
        })
    }
}

impl Policy for KlUcbPolicy {
    fn name(&self) -> String {
        "KL-UCB".into()
    }

    fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    fn select_action(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        if let Some(arm) = self.pulls.iter().position(|&n| n == 0) {
            return Ok(arm);
        }
        let budget = (self.t as f64).ln();
        self.scratch.clear();
        self.scratch.extend(
            self.successes
                .iter()
                .zip(&self.pulls)
                .map(|(&s, &n)| klucb_index(s as f64 / n as f64, n, budget)),
        );
        Ok(argmax_uniform_ties(&self.scratch, rng))
    }

    fn observe(&mut self, arm: usize, percept: bool) -> Result<()> {
        check_arm(arm, self.pulls.len())?;
        self.pulls[arm] += 1;
        self.successes[arm] += u64::from(percept);
        self.t += 1;
        Ok(())
    }

    fn reset(&mut self) {
        self.successes.iter_mut().for_each(|x| *x = 0);
        self.pulls.iter_mut().for_each(|x| *x = 0);
        self.t = 0;
    }
}
