//! Piecewise-stationary Bernoulli bandit environments.
//!
//! An [`NssbpSpec`] fixes the whole problem up front: a partition of
//! `1..=horizon` into contiguous segments and, for each segment, one success
//! probability per arm. Specs are immutable once built and cheap to share
//! between episode workers.

mod crn;
mod generators;

pub use crn::CrnStream;
pub use generators::{
    adversarial_two_segment, gen_geometric_adversarial, gen_geometric_uniform, gen_stationary,
};

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logspace::LogProb;
use crate::ptw::Segment;

/// One stationary piece: the arms' success probabilities on `segment`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentParams {
    pub segment: Segment,
    pub theta: Vec<f64>,
    best: f64,
}

impl SegmentParams {
    pub fn best_value(&self) -> f64 {
        self.best
    }

    /// Every arm attaining the segment's largest success probability.
    pub fn argmax_arms(&self) -> Vec<usize> {
        (0..self.theta.len())
            .filter(|&a| self.theta[a] == self.best)
            .collect()
    }
}

/// Serialized form: `{"num_arms": A, "horizon": T, "segments": [[c, d, [θ..]], ..]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    num_arms: usize,
    horizon: u64,
    segments: Vec<(u64, u64, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct NssbpSpec {
    num_arms: usize,
    horizon: u64,
    segments: Vec<SegmentParams>,
}

impl TryFrom<RawSpec> for NssbpSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        NssbpSpec::new(
            raw.num_arms,
            raw.horizon,
            raw.segments
                .into_iter()
                .map(|(c, d, th)| (Segment { c, d }, th))
                .collect(),
        )
    }
}

impl From<NssbpSpec> for RawSpec {
    fn from(spec: NssbpSpec) -> Self {
        RawSpec {
            num_arms: spec.num_arms,
            horizon: spec.horizon,
            segments: spec
                .segments
                .into_iter()
                .map(|s| (s.segment.c, s.segment.d, s.theta))
                .collect(),
        }
    }
}

impl NssbpSpec {
    /// Checks that the segments are contiguous, cover `1..=horizon` exactly
    /// and carry `num_arms` probabilities in `[0, 1]` each.
    pub fn new(num_arms: usize, horizon: u64, segments: Vec<(Segment, Vec<f64>)>) -> Result<Self> {
        if num_arms == 0 || horizon == 0 {
            return Err(Error::InvalidParameter(format!(
                "need num_arms >= 1 and horizon >= 1 (got {num_arms}, {horizon})"
            )));
        }
        let mut next = 1u64;
        let mut out = Vec::with_capacity(segments.len());
        for (segment, theta) in segments {
            if segment.c != next || segment.d < segment.c {
                return Err(Error::InvalidParameter(format!(
                    "segment ({},{}) does not continue the partition at time {next}",
                    segment.c, segment.d
                )));
            }
            if theta.len() != num_arms {
                return Err(Error::InvalidParameter(format!(
                    "segment ({},{}) has {} probabilities for {num_arms} arms",
                    segment.c,
                    segment.d,
                    theta.len()
                )));
            }
            if let Some(bad) = theta.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(Error::InvalidParameter(format!(
                    "probability {bad} outside [0, 1]"
                )));
            }
            next = segment.d + 1;
            let best = theta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            out.push(SegmentParams {
                segment,
                theta,
                best,
            });
        }
        if next != horizon + 1 {
            return Err(Error::InvalidParameter(format!(
                "partition covers 1..{} but the horizon is {horizon}",
                next - 1
            )));
        }
        Ok(Self {
            num_arms,
            horizon,
            segments: out,
        })
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn segments(&self) -> &[SegmentParams] {
        &self.segments
    }

    /// Index of the segment containing `t`.
    pub fn segment_index(&self, t: u64) -> Result<usize> {
        if t == 0 || t > self.horizon {
            return Err(Error::OutOfHorizon {
                time: t,
                horizon: self.horizon,
            });
        }
        Ok(self.segments.partition_point(|s| s.segment.d < t))
    }

    pub fn params_at(&self, t: u64) -> Result<&SegmentParams> {
        Ok(&self.segments[self.segment_index(t)?])
    }

    pub fn theta(&self, t: u64, arm: usize) -> Result<f64> {
        let params = self.params_at(t)?;
        params.theta.get(arm).copied().ok_or(Error::InvalidArm {
            arm,
            num_arms: self.num_arms,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Bernoulli draw for pulling `arm` at time `t`.
pub fn env_step(spec: &NssbpSpec, t: u64, arm: usize, rng: &mut dyn RngCore) -> Result<bool> {
    let theta = spec.theta(t, arm)?;
    Ok(rng.random::<f64>() < theta)
}

/// Expected shortfall of `arm` against the best arm at time `t`.
pub fn pseudo_regret_step(spec: &NssbpSpec, t: u64, arm: usize) -> Result<f64> {
    let params = spec.params_at(t)?;
    let theta = params.theta.get(arm).ok_or(Error::InvalidArm {
        arm,
        num_arms: spec.num_arms,
    })?;
    Ok(params.best - theta)
}

/// `lb` probability of `percepts` given `actions` under the true environment.
pub fn env_log_likelihood(
    spec: &NssbpSpec,
    actions: &[usize],
    percepts: &[bool],
) -> Result<LogProb> {
    if actions.len() != percepts.len() {
        return Err(Error::LengthMismatch {
            left: actions.len(),
            right: percepts.len(),
        });
    }
    let mut bits = 0.0;
    for (i, (&a, &e)) in actions.iter().zip(percepts).enumerate() {
        let theta = spec.theta(i as u64 + 1, a)?;
        bits += if e {
            theta.log2()
        } else {
            (1.0 - theta).log2()
        };
    }
    Ok(LogProb(bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_piece() -> NssbpSpec {
        NssbpSpec::new(
            2,
            10,
            vec![
                (Segment::new(1, 4), vec![0.5, 0.5]),
                (Segment::new(5, 10), vec![1.0, 0.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let s = |c, d| Segment { c, d };
        assert!(NssbpSpec::new(2, 4, vec![(s(1, 2), vec![0.1, 0.2])]).is_err());
        assert!(NssbpSpec::new(
            2,
            4,
            vec![(s(1, 2), vec![0.1, 0.2]), (s(4, 4), vec![0.; 2])]
        )
        .is_err());
        assert!(NssbpSpec::new(2, 2, vec![(s(1, 2), vec![0.1])]).is_err());
        assert!(NssbpSpec::new(2, 2, vec![(s(1, 2), vec![0.1, 1.5])]).is_err());
        assert!(NssbpSpec::new(2, 2, vec![(s(1, 2), vec![0.1, f64::NAN])]).is_err());
        assert!(NssbpSpec::new(0, 2, vec![]).is_err());
        assert!(NssbpSpec::new(1, 2, vec![(s(1, 2), vec![0.3])]).is_ok());
    }

    #[test]
    fn lookup_and_regret() {
        let spec = two_piece();
        assert_eq!(spec.segment_index(4).unwrap(), 0);
        assert_eq!(spec.segment_index(5).unwrap(), 1);
        assert!(spec.segment_index(11).is_err());
        assert!(spec.segment_index(0).is_err());
        assert_eq!(pseudo_regret_step(&spec, 7, 1).unwrap(), 1.0);
        assert_eq!(pseudo_regret_step(&spec, 7, 0).unwrap(), 0.0);
        assert!(pseudo_regret_step(&spec, 7, 2).is_err());
    }

    #[test]
    fn deterministic_thetas() {
        let spec = two_piece();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert!(env_step(&spec, 5, 0, &mut rng).unwrap());
            assert!(!env_step(&spec, 5, 1, &mut rng).unwrap());
        }
    }

    #[test]
    fn step_frequency() {
        let spec = NssbpSpec::new(1, 1, vec![(Segment::new(1, 1), vec![0.3])]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| env_step(&spec, 1, 0, &mut rng).unwrap())
            .count();
        let sd = (n as f64 * 0.3 * 0.7).sqrt();
        assert!((hits as f64 - 0.3 * n as f64).abs() < 3.0 * sd);
    }

    #[test]
    fn log_likelihood() {
        let spec = two_piece();
        let half = env_log_likelihood(&spec, &[0, 1, 0, 1], &[true, false, false, true]).unwrap();
        assert_eq!(half.bits(), -4.0);
        let sure = NssbpSpec::new(2, 8, vec![(Segment::new(1, 8), vec![1.0, 0.25])]).unwrap();
        assert_eq!(
            env_log_likelihood(&sure, &[0; 8], &[true; 8])
                .unwrap()
                .bits(),
            0.0
        );
        assert!(env_log_likelihood(&sure, &[0; 3], &[true; 2]).is_err());

        let actions = [0, 1, 1, 0, 1, 1, 1, 0, 0, 1];
        let percepts = [
            true, false, true, false, true, true, false, true, false, false,
        ];
        let spec = NssbpSpec::new(
            2,
            10,
            vec![
                (Segment::new(1, 5), vec![0.3, 0.6]),
                (Segment::new(6, 10), vec![0.9, 0.2]),
            ],
        )
        .unwrap();
        let total = env_log_likelihood(&spec, &actions, &percepts)
            .unwrap()
            .bits();
        let mut stepwise = 0.0;
        for t in 0..actions.len() {
            let theta = spec.theta(t as u64 + 1, actions[t]).unwrap();
            stepwise += if percepts[t] {
                theta.log2()
            } else {
                (1.0 - theta).log2()
            };
        }
        assert!((total - stepwise).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let spec = two_piece();
        let text = spec.to_json().unwrap();
        assert!(text.contains("segments"));
        assert_eq!(NssbpSpec::from_json(&text).unwrap(), spec);
        let broken = r#"{"num_arms":1,"horizon":3,"segments":[[1,2,[0.5]]]}"#;
        assert!(NssbpSpec::from_json(broken).is_err());
    }
}
