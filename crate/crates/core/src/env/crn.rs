//! Common random numbers for environment percepts.
//!
//! Each episode owns one uniform variate per `(t, arm)` cell, so two
//! algorithms pulling the same arm at the same time see the same percept even
//! when their earlier action paths differ. The variates are a pure function of
//! `(seed, t, arm)`, computed on demand by a counter-based hash instead of
//! being stored as a `T × A` table.

use super::NssbpSpec;
use crate::error::Result;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrnStream {
    seed: u64,
}

impl CrnStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed: splitmix64(seed),
        }
    }

    /// Uniform variate in `[0, 1)` for cell `(t, arm)`.
    pub fn uniform(&self, t: u64, arm: usize) -> f64 {
        let h = splitmix64(self.seed ^ splitmix64(t));
        let h = splitmix64(h ^ (arm as u64).wrapping_mul(GOLDEN));
        (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn percept(&self, spec: &NssbpSpec, t: u64, arm: usize) -> Result<bool> {
        Ok(self.uniform(t, arm) < spec.theta(t, arm)?)
    }
}
