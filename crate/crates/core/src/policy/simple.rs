//! Baseline policies that ignore feedback.

use rand::{Rng, RngCore};

use super::{check_arm, check_num_arms, Policy};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct UniformPolicy {
    num_arms: usize,
}

impl UniformPolicy {
    pub fn new(num_arms: usize) -> Result<Self> {
        check_num_arms(num_arms)?;
        Ok(Self { num_arms })
    }
}

impl Policy for UniformPolicy {
    fn name(&self) -> String {
        "Uniform".into()
    }
    fn num_arms(&self) -> usize {
        self.num_arms
    }
    fn select_action(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        Ok(rng.random_range(0..self.num_arms))
    }
    fn observe(&mut self, arm: usize, _percept: bool) -> Result<()> {
        check_arm(arm, self.num_arms)
    }
    fn reset(&mut self) {}
}

/// Always pulls the same arm.
#[derive(Debug, Clone)]
pub struct ConstantPolicy {
    num_arms: usize,
    arm: usize,
}

impl ConstantPolicy {
    pub fn new(num_arms: usize, arm: usize) -> Result<Self> {
        check_num_arms(num_arms)?;
        check_arm(arm, num_arms)?;
        Ok(Self { num_arms, arm })
    }
}

impl Policy for ConstantPolicy {
    fn name(&self) -> String {
        format!("Constant({})", self.arm)
    }
    fn num_arms(&self) -> usize {
        self.num_arms
    }
    fn select_action(&mut self, _rng: &mut dyn RngCore) -> Result<usize> {
        Ok(self.arm)
    }
    fn observe(&mut self, arm: usize, _percept: bool) -> Result<()> {
        check_arm(arm, self.num_arms)
    }
    fn reset(&mut self) {}
}
