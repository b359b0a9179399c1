//! UCB1 and its sliding-window variant.
//!
//! Both use the classical index `mean + sqrt(2 ln t / n)`. An arm with no
//! data has an infinite index; among several such arms the lowest index is
//! played, which gives the round-robin initialisation of UCB1.

use std::collections::VecDeque;

use rand::RngCore;

use super::{argmax_uniform_ties, check_arm, check_num_arms, Policy};
use crate::error::{Error, Result};

pub const EXPLORATION: f64 = 2.0;

/// Shared index rule over `(successes, pulls)` counts.
pub(crate) fn ucb_select(
    successes: &[u64],
    pulls: &[u64],
    t: u64,
    scratch: &mut Vec<f64>,
    rng: &mut dyn RngCore,
) -> usize {
    if let Some(arm) = pulls.iter().position(|&n| n == 0) {
        return arm;
    }
    let log_t = (t.max(1) as f64).ln();
    scratch.clear();
    scratch.extend(successes.iter().zip(pulls).map(|(&s, &n)| {
        let n = n as f64;
        s as f64 / n + (EXPLORATION * log_t / n).sqrt()
    }));
    argmax_uniform_ties(scratch, rng)
}

/// UCB1 index of every arm, or `None` while some arm is unpulled.
pub(crate) fn ucb_indices(successes: &[u64], pulls: &[u64], t: u64) -> Option<Vec<f64>> {
    if pulls.contains(&0) {
        return None;
    }
    let log_t = (t.max(1) as f64).ln();
    Some(
        successes
            .iter()
            .zip(pulls)
            .map(|(&s, &n)| s as f64 / n as f64 + (EXPLORATION * log_t / n as f64).sqrt())
            .collect(),
    )
}

#[derive(Debug, Clone)]
pub struct Ucb1Policy {
    successes: Vec<u64>,
    pulls: Vec<u64>,
    t: u64,
    scratch: Vec<f64>,
}

impl Ucb1Policy {
    pub fn new(num_arms: usize) -> Result<Self> {
        check_num_arms(num_arms)?;
        Ok(Self {
            successes: vec![0; num_arms],
            pulls: vec![0; num_arms],
            t: 0,
            scratch: Vec::with_capacity(num_arms),
        })
    }

    pub fn pulls(&self) -> &[u64] {
        &self.pulls
    }

    pub fn successes(&self) -> &[u64] {
        &self.successes
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// Largest UCB index clipped to `[0, 1]`; 1 while an arm is unpulled.
    pub fn optimistic_value(&self) -> f64 {
        ucb_indices(&self.successes, &self.pulls, self.t)
            .map_or(1.0, |ix| ix.into_iter().fold(0.0, f64::max).min(1.0))
    }
}

impl Policy for Ucb1Policy {
    fn name(&self) -> String {
        "UCB".into()
    }

    fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    fn select_action(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        Ok(ucb_select(
            &self.successes,
            &self.pulls,
            self.t,
            &mut self.scratch,
            rng,
        ))
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

/// UCB restricted to the last `window` steps.
#[derive(Debug, Clone)]
pub struct SlidingWindowUcbPolicy {
    window: usize,
    history: VecDeque<(usize, bool)>,
    successes: Vec<u64>,
    pulls: Vec<u64>,
    t: u64,
    scratch: Vec<f64>,
}

impl SlidingWindowUcbPolicy {
    pub fn new(num_arms: usize, window: u64) -> Result<Self> {
        check_num_arms(num_arms)?;
        if window == 0 {
            return Err(Error::InvalidParameter(
                "sliding window must be >= 1".into(),
            ));
        }
        Ok(Self {
            window: window as usize,
            history: VecDeque::with_capacity(window.min(1 << 20) as usize),
            successes: vec![0; num_arms],
            pulls: vec![0; num_arms],
            t: 0,
            scratch: Vec::with_capacity(num_arms),
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn window_pulls(&self) -> &[u64] {
        &self.pulls
    }

    pub fn window_successes(&self) -> &[u64] {
        &self.successes
    }

    pub fn history(&self) -> impl Iterator<Item = &(usize, bool)> {
        self.history.iter()
    }
}

impl Policy for SlidingWindowUcbPolicy {
    fn name(&self) -> String {
        format!("SWUCB(W={})", self.window)
    }

    fn num_arms(&self) -> usize {
        self.pulls.len()
    }

    fn select_action(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        let t = self.t.min(self.window as u64);
        Ok(ucb_select(
            &self.successes,
            &self.pulls,
            t,
            &mut self.scratch,
            rng,
        ))
    }

    fn observe(&mut self, arm: usize, percept: bool) -> Result<()> {
        check_arm(arm, self.pulls.len())?;
        if self.history.len() == self.window {
            let (old_arm, old_percept) = self.history.pop_front().expect("window is non-empty");
            self.pulls[old_arm] -= 1;
            self.successes[old_arm] -= u64::from(old_percept);
        }
        self.history.push_back((arm, percept));
        self.pulls[arm] += 1;
        self.successes[arm] += u64::from(percept);
        self.t += 1;
        Ok(())
    }

    fn reset(&mut self) {
        self.history.clear();
        self.successes.iter_mut().for_each(|x| *x = 0);
        self.pulls.iter_mut().for_each(|x| *x = 0);
        self.t = 0;
    }
}
