use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::policy::{ActivePtwPolicy, Policy, ReferencePolicy};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTiming {
    pub depth: u32,
    pub steps: u64,
    pub total: Duration,
}

impl StepTiming {
    pub fn nanos_per_step(&self) -> f64 {
        self.total.as_nanos() as f64 / self.steps as f64
    }
}

/// Wall-clock cost of `steps` act/observe rounds of an MEU ActivePTW agent on
/// a fixed Bernoulli bandit.
pub fn time_active_ptw_step(
    depth: u32,
    num_arms: usize,
    steps: u64,
    seed: u64,
) -> Result<StepTiming> {
    let mut policy = ActivePtwPolicy::new(
        num_arms,
        depth,
        ActivePtwPolicy::default_gamma(num_arms),
        ReferencePolicy::Meu,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut env = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    let theta: Vec<f64> = (0..num_arms)
        .map(|a| (a as f64 + 1.0) / (num_arms as f64 + 1.0))
        .collect();
    let start = Instant::now();
    for _ in 0..steps {
        let arm = policy.select_action(&mut rng)?;
        policy.observe(arm, env.random::<f64>() < theta[arm])?;
    }
    Ok(StepTiming {
        depth,
        steps,
        total: start.elapsed(),
    })
}
