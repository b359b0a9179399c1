//! MASTER multi-scale restarting wrapped around UCB1.
//!
//! Time is split into blocks of doubling length `2^n`. Inside a block, an
//! order-`n` UCB1 instance covers the whole block and, at each dyadic offset
//! divisible by `2^m`, an order-`m` instance covering the next `2^m` steps is
//! scheduled with probability `2^{(m-n)/2}` (the ratio `ρ(2^n)/ρ(2^m)` for
//! `ρ(t) ∝ t^{-1/2}`). The most recently started live instance acts and is
//! the only one that learns. Two stationarity tests compare realised rewards
//! against the running minimum of the acting instances' optimistic values and
//! restart from a fresh order-`start_order` block when either fires.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{check_arm, check_num_arms, Policy, Ucb1Policy};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MasterConfig {
    /// Horizon used by the test thresholds.
    pub horizon: u64,
    /// Multiplier on every sub-instance scheduling probability; 0 disables
    /// random restarts.
    pub restart_scale: f64,
    pub tests_enabled: bool,
    /// Order of the first block and of every block after a test restart.
    pub start_order: u32,
}

impl MasterConfig {
    pub fn new(horizon: u64) -> Self {
        Self {
            horizon,
            restart_scale: 1.0,
            tests_enabled: true,
            start_order: 0,
        }
    }
}

/// Counters of scheduling and restart events.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MasterLog {
    pub blocks: u64,
    pub scheduled_instances: u64,
    pub test1_triggers: u64,
    pub test2_triggers: u64,
}

#[derive(Debug, Clone)]
struct Instance {
    order: u32,
    end: u64,
    reward_sum: u64,
    ucb: Ucb1Policy,
}

#[derive(Debug, Clone)]
pub struct MasterUcb1Policy {
    num_arms: usize,
    cfg: MasterConfig,
    /// Completed steps.
    t: u64,
    block_order: u32,
    block_start: u64,
    block_end: u64,
    restart_pending: bool,
    scheduled_for: u64,
    stack: Vec<Instance>,
    running_min: f64,
    gap_sum: f64,
    last_optimism: f64,
    log: MasterLog,
}

impl MasterUcb1Policy {
    pub fn new(num_arms: usize, cfg: MasterConfig) -> Result<Self> {
        check_num_arms(num_arms)?;
        if cfg.restart_scale.is_nan()
            || cfg.restart_scale < 0.0
            || cfg.horizon == 0
            || cfg.start_order > 62
        {
            return Err(Error::InvalidParameter(format!(
                "invalid MASTER config {cfg:?}"
            )));
        }
        let mut policy = Self {
            num_arms,
            cfg,
            t: 0,
            block_order: 0,
            block_start: 0,
            block_end: 0,
            restart_pending: true,
            scheduled_for: 0,
            stack: Vec::new(),
            running_min: f64::INFINITY,
            gap_sum: 0.0,
            last_optimism: 1.0,
            log: MasterLog::default(),
        };
        policy.reset();
        Ok(policy)
    }

    pub fn log(&self) -> MasterLog {
        self.log
    }

    /// Test threshold `ρ̂(len) = 6 (lb T + 1) ln(T/δ) sqrt(A / len)` with
    /// `δ = 1/T`.
    fn rho_hat(&self, len: u64) -> f64 {
        let horizon = self.cfg.horizon.max(2) as f64;
        6.0 * (horizon.log2() + 1.0)
            * 2.0
            * horizon.ln()
            * (self.num_arms as f64 / len as f64).sqrt()
    }

    fn fresh_instance(&self, order: u32, start: u64) -> Instance {
        Instance {
            order,
            end: start + (1u64 << order) - 1,
            reward_sum: 0,
            ucb: Ucb1Policy::new(self.num_arms).expect("num_arms validated"),
        }
    }

    fn prepare_step(&mut self, rng: &mut dyn RngCore) {
        let now = self.t + 1;
        if self.scheduled_for == now {
            return;
        }
        self.scheduled_for = now;
        if self.restart_pending || now > self.block_end {
            if self.restart_pending {
                self.block_order = self.cfg.start_order;
            } else {
                self.block_order += 1;
            }
            self.restart_pending = false;
            self.block_start = now;
            self.block_end = now + (1u64 << self.block_order) - 1;
            self.stack.clear();
            self.stack.push(self.fresh_instance(self.block_order, now));
            self.running_min = f64::INFINITY;
            self.gap_sum = 0.0;
            self.log.blocks += 1;
        }
        if self.cfg.restart_scale > 0.0 {
            let offset = now - self.block_start;
            let n = self.block_order;
            let max_m = if offset == 0 {
                n
            } else {
                offset.trailing_zeros().min(n)
            };
            for m in (0..max_m.min(n)).rev() {
                let p = self.cfg.restart_scale * 2f64.powf((m as f64 - n as f64) / 2.0);
                if rng.random::<f64>() < p {
                    let instance = self.fresh_instance(m, now);
                    self.stack.push(instance);
                    self.log.scheduled_instances += 1;
                }
            }
        }
    }
}

impl Policy for MasterUcb1Policy {
    fn name(&self) -> String {
        "MASTER".into()
    }

    fn num_arms(&self) -> usize {
        self.num_arms
    }

    fn select_action(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        self.prepare_step(rng);
        let active = self
            .stack
            .last_mut()
            .expect("a block instance is always live");
        self.last_optimism = active.ucb.optimistic_value();
        active.ucb.select_action(rng)
    }

    fn observe(&mut self, arm: usize, percept: bool) -> Result<()> {
        check_arm(arm, self.num_arms)?;
        if self.scheduled_for != self.t + 1 {
            return Err(Error::InvalidParameter(
                "observe called before select_action".into(),
            ));
        }
        let reward = u64::from(percept);
        self.stack
            .last_mut()
            .expect("live instance")
            .ucb
            .observe(arm, percept)?;
        for inst in &mut self.stack {
            inst.reward_sum += reward;
        }
        self.t += 1;
        self.running_min = self.running_min.min(self.last_optimism);
        self.gap_sum += self.last_optimism - reward as f64;

        let mut triggered = false;
        while let Some(top) = self.stack.last() {
            if top.end != self.t {
                break;
            }
            let done = self.stack.pop().expect("checked above");
            if self.cfg.tests_enabled && done.order < self.block_order {
                let mean = done.reward_sum as f64 / (1u64 << done.order) as f64;
                if mean >= self.running_min + 9.0 * self.rho_hat(1u64 << done.order) {
                    self.log.test1_triggers += 1;
                    triggered = true;
                }
            }
        }
        if self.cfg.tests_enabled {
            let len = self.t - self.block_start + 1;
            if self.gap_sum / len as f64 >= 3.0 * self.rho_hat(len) {
                self.log.test2_triggers += 1;
                triggered = true;
            }
        }
        if triggered {
            self.restart_pending = true;
        }
        Ok(())
    }

    fn reset(&mut self) {
        self.t = 0;
        self.block_order = self.cfg.start_order;
        self.block_start = 0;
        self.block_end = 0;
        self.restart_pending = true;
        self.scheduled_for = 0;
        self.stack.clear();
        self.running_min = f64::INFINITY;
        self.gap_sum = 0.0;
        self.last_optimism = 1.0;
        self.log = MasterLog::default();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn drive(policy: &mut dyn Policy, steps: u64, seed: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut env = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
        let theta = [0.2, 0.5, 0.55, 0.3];
        (0..steps)
            .map(|_| {
                let a = policy.select_action(&mut rng).unwrap();
                policy.observe(a, env.random::<f64>() < theta[a]).unwrap();
                a
            })
            .collect()
    }

    #[test]
    fn degenerate_schedule_is_ucb1() {
        let horizon = 3000;
        let cfg = MasterConfig {
            horizon,
            restart_scale: 0.0,
            tests_enabled: false,
            start_order: 12,
        };
        let mut master = MasterUcb1Policy::new(4, cfg).unwrap();
        let mut ucb = Ucb1Policy::new(4).unwrap();
        assert_eq!(drive(&mut master, horizon, 3), drive(&mut ucb, horizon, 3));
        assert_eq!(master.log().scheduled_instances, 0);
        assert_eq!(master.log().blocks, 1);
    }

    #[test]
    fn default_schedule_restarts() {
        let mut master = MasterUcb1Policy::new(4, MasterConfig::new(100_000)).unwrap();
        drive(&mut master, 100_000, 1);
        let log = master.log();
        assert!(log.scheduled_instances > 0, "{log:?}");
        assert!(log.blocks >= 16);
    }

    #[test]
    fn deterministic_given_seed() {
        let mut a = MasterUcb1Policy::new(4, MasterConfig::new(5000)).unwrap();
        let mut b = MasterUcb1Policy::new(4, MasterConfig::new(5000)).unwrap();
        assert_eq!(drive(&mut a, 5000, 11), drive(&mut b, 5000, 11));
        assert_eq!(a.log(), b.log());
        let first = a.log();
        a.reset();
        let mut c = MasterUcb1Policy::new(4, MasterConfig::new(5000)).unwrap();
        assert_eq!(drive(&mut a, 5000, 11), drive(&mut c, 5000, 11));
        assert_eq!(a.log(), first);
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = MasterConfig::new(10);
        cfg.restart_scale = -1.0;
        assert!(MasterUcb1Policy::new(2, cfg).is_err());
    }
}
