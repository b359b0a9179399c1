//! ActivePTW: Thompson-style sampling from the PTW-KTE posterior.
//!
//! Each step draws an active segment from the segment posterior, draws every
//! arm's success probability from that segment's KT posterior, and then acts
//! with the chosen reference policy for the sampled environment.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{argmax_uniform_ties, check_arm, Policy};
use crate::error::Result;
use crate::ptw::PtwState;

/// Reference policy applied to the sampled environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferencePolicy {
    /// Play an arm with the highest sampled success probability.
    #[default]
    Meu,
    /// As `Meu`, but with probability `α(d - c)` play a uniform arm, where
    /// `α(l) = min(1, max(1, l)^{-1/2})` and `(c, d)` is the sampled segment.
    Meufe,
}

/// Forced-exploration probability for a segment of length `len`.
pub fn exploration_rate(len: u64) -> f64 {
    let span = len.saturating_sub(1).max(1) as f64;
    span.powf(-0.5).min(1.0)
}

#[derive(Debug, Clone)]
pub struct ActivePtwPolicy {
    ptw: PtwState,
    mode: ReferencePolicy,
    thetas: Vec<f64>,
    forced: Vec<u64>,
}

impl ActivePtwPolicy {
    pub fn new(num_arms: usize, depth: u32, gamma: f64, mode: ReferencePolicy) -> Result<Self> {
        Ok(Self {
            ptw: PtwState::new(depth, num_arms, gamma)?,
            mode,
            thetas: vec![0.0; num_arms],
            forced: vec![0; num_arms],
        })
    }

    /// `γ = A / (A + 1)`.
    pub fn default_gamma(num_arms: usize) -> f64 {
        num_arms as f64 / (num_arms as f64 + 1.0)
    }

    pub fn ptw(&self) -> &PtwState {
        &self.ptw
    }

    pub fn mode(&self) -> ReferencePolicy {
        self.mode
    }

    /// Per-arm count of uniformly forced explorations (MEUFE only).
    pub fn forced_explorations(&self) -> &[u64] {
        &self.forced
    }
}

impl Policy for ActivePtwPolicy {
    fn name(&self) -> String {
        match self.mode {
            ReferencePolicy::Meu => "ActivePTW(MEU)".into(),
            ReferencePolicy::Meufe => "ActivePTW(MEUFE)".into(),
        }
    }

    fn num_arms(&self) -> usize {
        self.thetas.len()
    }

    fn horizon(&self) -> Option<u64> {
        Some(self.ptw.horizon())
    }

    fn select_action(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        let scale = self.ptw.sample_scale(rng)?;
        if self.mode == ReferencePolicy::Meufe {
            let alpha = exploration_rate(1u64 << scale);
            if rng.random::<f64>() < alpha {
                let arm = rng.random_range(0..self.thetas.len());
                self.forced[arm] += 1;
                return Ok(arm);
            }
        }
        let stats = self.ptw.level_stats(scale).arms();
        for (theta, s) in self.thetas.iter_mut().zip(stats) {
            *theta = s.sample_posterior(rng);
        }
        Ok(argmax_uniform_ties(&self.thetas, rng))
    }

    fn observe(&mut self, arm: usize, percept: bool) -> Result<()> {
        check_arm(arm, self.thetas.len())?;
        self.ptw.update(arm, percept)
    }

    fn reset(&mut self) {
        self.ptw = PtwState::new(self.ptw.depth(), self.thetas.len(), self.ptw.gamma())
            .expect("parameters were validated at construction");
        self.forced.iter_mut().for_each(|x| *x = 0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::policy::ThompsonPolicy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_arm_always_zero() {
        let mut p = ActivePtwPolicy::new(1, 6, 0.5, ReferencePolicy::Meufe).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..64 {
            let a = p.select_action(&mut rng).unwrap();
            assert_eq!(a, 0);
            p.observe(a, rng.random()).unwrap();
        }
        assert!(matches!(
            p.select_action(&mut rng),
            Err(Error::OutOfHorizon { .. })
        ));
    }

    #[test]
    fn fresh_selection_is_exchangeable() {
        let arms = 4;
        let p = ActivePtwPolicy::new(arms, 10, 0.8, ReferencePolicy::Meu).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 100_000;
        let mut counts = vec![0usize; arms];
        for _ in 0..n {
            counts[p.clone().select_action(&mut rng).unwrap()] += 1;
        }
        let q = 1.0 / arms as f64;
        let sd = (n as f64 * q * (1.0 - q)).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 * q).abs() < 3.0 * sd);
        }
    }

    #[test]
    fn exploration_rate_clamps() {
        assert_eq!(exploration_rate(1), 1.0);
        assert_eq!(exploration_rate(2), 1.0);
        assert!((exploration_rate(5) - 0.5).abs() < 1e-15);
        assert!((exploration_rate(1 << 16) - 1.0 / 65535f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn meufe_on_unit_segment_is_uniform() {
        // Depth 0 means the only segment is a unit leaf, so every action is
        // a forced uniform draw.
        let mut counts = [0usize; 3];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 30_000;
        for _ in 0..n {
            let mut p = ActivePtwPolicy::new(3, 0, 0.75, ReferencePolicy::Meufe).unwrap();
            counts[p.select_action(&mut rng).unwrap()] += 1;
            assert_eq!(p.forced_explorations().iter().sum::<u64>(), 1);
        }
        let q = 1.0 / 3.0;
        let sd = (n as f64 * q * (1.0 - q)).sqrt();
        for c in counts {
            assert!((c as f64 - n as f64 * q).abs() < 3.0 * sd);
        }
    }

    #[test]
    fn observe_on_fresh_depth_one() {
        let mut p = ActivePtwPolicy::new(1, 1, 0.5, ReferencePolicy::Meu).unwrap();
        p.observe(0, true).unwrap();
        assert!((p.ptw().log_marginal().bits() - 0.5f64.log2()).abs() < 1e-12);
        assert_eq!(p.ptw().time(), 1);
    }

    #[test]
    fn selection_leaves_state_untouched() {
        let mut a = ActivePtwPolicy::new(3, 5, 0.75, ReferencePolicy::Meu).unwrap();
        let mut b = a.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for t in 0..20 {
            let arm = t % 3;
            for _ in 0..3 {
                a.select_action(&mut rng).unwrap();
            }
            a.observe(arm, t % 2 == 0).unwrap();
            b.observe(arm, t % 2 == 0).unwrap();
        }
        assert_eq!(a.ptw(), b.ptw());
    }

    #[test]
    fn depth_zero_matches_thompson() {
        for seed in 0..200 {
            let mut ptw = ActivePtwPolicy::new(5, 0, 5.0 / 6.0, ReferencePolicy::Meu).unwrap();
            let mut ts = ThompsonPolicy::new(5).unwrap();
            let mut r1 = ChaCha8Rng::seed_from_u64(seed);
            let mut r2 = r1.clone();
            assert_eq!(
                ptw.select_action(&mut r1).unwrap(),
                ts.select_action(&mut r2).unwrap()
            );
            assert_eq!(r1, r2);
        }
    }

    #[test]
    fn relabelled_history_permutes_segment_stats() {
        let perm = [2usize, 0, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let history: Vec<(usize, bool)> = (0..40)
            .map(|_| (rng.random_range(0..3), rng.random::<f64>() < 0.5))
            .collect();
        let mut a = ActivePtwPolicy::new(3, 6, 0.75, ReferencePolicy::Meu).unwrap();
        let mut b = a.clone();
        for &(arm, e) in &history {
            a.observe(arm, e).unwrap();
            b.observe(perm[arm], e).unwrap();
        }
        for seed in 0..50 {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let scale = a.ptw().sample_scale(&mut r).unwrap();
            let scale_b = b
                .ptw()
                .sample_scale(&mut ChaCha8Rng::seed_from_u64(seed))
                .unwrap();
            assert_eq!(scale, scale_b);
            let sa = a.ptw().level_stats(scale).arms();
            let sb = b.ptw().level_stats(scale).arms();
            for arm in 0..3 {
                assert_eq!(sa[arm], sb[perm[arm]]);
            }
        }
    }
}
