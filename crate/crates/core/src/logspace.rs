//! Base-2 log-domain arithmetic.
//!
//! Every probability in the crate is carried as `lb p` (bits, `<= 0` for
//! `p <= 1`). Mixtures are combined with a max-shifted log-sum-exp so that
//! products over 10^6 steps never underflow.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Base-2 logarithm of a probability.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogProb(pub f64);

impl LogProb {
    pub const ONE: LogProb = LogProb(0.0);
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);

    pub fn from_prob(p: f64) -> Self {
        LogProb(p.log2())
    }

    #[inline]
    pub fn bits(self) -> f64 {
        self.0
    }

    pub fn prob(self) -> f64 {
        self.0.exp2()
    }
}

impl fmt::Display for LogProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

impl std::ops::Add for LogProb {
    type Output = LogProb;
    fn add(self, rhs: LogProb) -> LogProb {
        LogProb(self.0 + rhs.0)
    }
}

impl std::ops::Sub for LogProb {
    type Output = LogProb;
    fn sub(self, rhs: LogProb) -> LogProb {
        LogProb(self.0 - rhs.0)
    }
}

impl std::ops::AddAssign for LogProb {
    fn add_assign(&mut self, rhs: LogProb) {
        self.0 += rhs.0;
    }
}

/// `lb(2^a + 2^b)`.
#[inline]
pub fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp2().ln_1p() * std::f64::consts::LOG2_E
}

/// `lb(Σ 2^x)` over a slice; `-inf` for an empty slice.
pub fn log2_sum(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|&x| (x - max).exp2()).sum::<f64>().log2()
}
