//! Krichevsky–Trofimov estimation of Bernoulli sources.
//!
//! [`KtStats`] is the sufficient statistic of a single KT estimator (Jeffreys
//! prior Beta(½, ½) on the success probability). [`KteState`] keeps one KT
//! estimator per arm, which gives a universal model for the percepts of a
//! stationary Bernoulli bandit under any action sequence.

use rand::RngCore;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::logspace::LogProb;

/// Counts of 0- and 1-percepts seen by one KT estimator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KtStats {
    pub zeros: u64,
    pub ones: u64,
}

impl KtStats {
    pub fn new(zeros: u64, ones: u64) -> Self {
        Self { zeros, ones }
    }

    #[inline]
    pub fn total(&self) -> u64 {
        self.zeros + self.ones
    }

    /// Sequential KT prediction `lb P(symbol | counts)`.
    #[inline]
    pub fn predict(&self, symbol: bool) -> LogProb {
        let count = if symbol { self.ones } else { self.zeros };
        LogProb(((count as f64 + 0.5) / (self.total() as f64 + 1.0)).log2())
    }

    #[inline]
    pub fn update(&mut self, symbol: bool) {
        if symbol {
            self.ones += 1;
        } else {
            self.zeros += 1;
        }
    }

    /// Closed form `lb[B(#0 + ½, #1 + ½) / π]` via log-Gamma.
    pub fn log_marginal(&self) -> LogProb {
        let nats = ln_gamma(self.zeros as f64 + 0.5) + ln_gamma(self.ones as f64 + 0.5)
            - ln_gamma(self.total() as f64 + 1.0)
            - std::f64::consts::PI.ln();
        LogProb(nats * std::f64::consts::LOG2_E)
    }

    /// Posterior mean `(#1 + ½) / (n + 1)`.
    pub fn posterior_mean(&self) -> f64 {
        (self.ones as f64 + 0.5) / (self.total() as f64 + 1.0)
    }

    /// Draw from the Beta(#1 + ½, #0 + ½) posterior.
    pub fn sample_posterior(&self, rng: &mut dyn RngCore) -> f64 {
        // Both shape parameters are >= ½, so construction cannot fail.
        Beta::new(self.ones as f64 + 0.5, self.zeros as f64 + 0.5)
            .expect("KT posterior shapes are positive")
            .sample(rng)
    }
}

/// One KT estimator per arm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KteState {
    per_arm: Vec<KtStats>,
}

impl KteState {
    pub fn new(num_arms: usize) -> Self {
        Self {
            per_arm: vec![KtStats::default(); num_arms],
        }
    }

    pub fn num_arms(&self) -> usize {
        self.per_arm.len()
    }

    pub fn arm(&self, arm: usize) -> Result<&KtStats> {
        self.per_arm.get(arm).ok_or(Error::InvalidArm {
            arm,
            num_arms: self.per_arm.len(),
        })
    }

    pub fn arms(&self) -> &[KtStats] {
        &self.per_arm
    }

    pub fn predict(&self, arm: usize, symbol: bool) -> Result<LogProb> {
        Ok(self.arm(arm)?.predict(symbol))
    }

    pub fn update(&mut self, arm: usize, symbol: bool) -> Result<()> {
        let num_arms = self.per_arm.len();
        self.per_arm
            .get_mut(arm)
            .ok_or(Error::InvalidArm { arm, num_arms })?
            .update(symbol);
        Ok(())
    }

    /// Total number of percepts absorbed across all arms.
    pub fn total(&self) -> u64 {
        self.per_arm.iter().map(KtStats::total).sum()
    }

    /// Number of arms pulled at least once.
    pub fn used_arms(&self) -> usize {
        self.per_arm.iter().filter(|s| s.total() > 0).count()
    }

    pub fn log_marginal(&self) -> LogProb {
        LogProb(self.per_arm.iter().map(|s| s.log_marginal().bits()).sum())
    }

    pub fn clear(&mut self) {
        self.per_arm
            .iter_mut()
            .for_each(|s| *s = KtStats::default());
    }
}

/// Worst-case KT redundancy `½ lb n + 1` against any Bernoulli source.
pub fn kt_redundancy_bound(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidLength(
            "KT redundancy bound needs n >= 1".into(),
        ));
    }
    Ok(0.5 * (n as f64).log2() + 1.0)
}

/// KTE redundancy `(|A'|/2) lb(n/|A'|) + |A'|` where `|A'|` is the number of
/// arms pulled at least once.
pub fn kte_redundancy_bound(n: u64, used_arms: u64) -> Result<f64> {
    if used_arms == 0 || used_arms > n {
        return Err(Error::InvalidLength(format!(
            "KTE redundancy bound needs 1 <= used_arms ({used_arms}) <= n ({n})"
        )));
    }
    let k = used_arms as f64;
    Ok(0.5 * k * (n as f64 / k).log2() + k)
}
