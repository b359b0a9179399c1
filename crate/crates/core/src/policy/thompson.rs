use rand::RngCore;

use super::{argmax_uniform_ties, check_arm, check_num_arms, Policy};
use crate::error::Result;
use crate::kt::KtStats;

/// Beta-Bernoulli Thompson sampling with the Jeffreys Beta(½, ½) prior, the
/// same prior as the KT estimators used by ActivePTW.
#[derive(Debug, Clone)]
pub struct ThompsonPolicy {
    stats: Vec<KtStats>,
    samples: Vec<f64>,
}

impl ThompsonPolicy {
    pub fn new(num_arms: usize) -> Result<Self> {
        check_num_arms(num_arms)?;
        Ok(Self {
            stats: vec![KtStats::default(); num_arms],
            samples: vec![0.0; num_arms],
        })
    }

    pub fn stats(&self) -> &[KtStats] {
        &self.stats
    }
}

impl Policy for ThompsonPolicy {
    fn name(&self) -> String {
        "TS".into()
    }

    fn num_arms(&self) -> usize {
        self.stats.len()
    }

    fn select_action(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        for (sample, stats) in self.samples.iter_mut().zip(&self.stats) {
            *sample = stats.sample_posterior(rng);
        }
        Ok(argmax_uniform_ties(&self.samples, rng))
    }

    fn observe(&mut self, arm: usize, percept: bool) -> Result<()> {
        check_arm(arm, self.stats.len())?;
        self.stats[arm].update(percept);
        Ok(())
    }

    fn reset(&mut self) {
        self.stats.iter_mut().for_each(|s| *s = KtStats::default());
    }
}
