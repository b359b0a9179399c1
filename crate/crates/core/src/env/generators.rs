//! Random and fixed problem instances.
//!
//! Segment lengths are `k + 1` with `k ~ Geometric(p)` counting failures
//! before the first success (`P[k] = p (1-p)^k`), so the mean length is `1/p`.
//! The final segment is truncated at the horizon.

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use super::NssbpSpec;
use crate::error::{Error, Result};
use crate::ptw::Segment;

fn check_dims(num_arms: usize, horizon: u64) -> Result<()> {
    if num_arms == 0 || horizon == 0 {
        return Err(Error::InvalidParameter(format!(
            "need num_arms >= 1 and horizon >= 1 (got {num_arms}, {horizon})"
        )));
    }
    Ok(())
}

fn uniform_theta<R: Rng + ?Sized>(num_arms: usize, rng: &mut R) -> Vec<f64> {
    (0..num_arms).map(|_| rng.random::<f64>()).collect()
}

fn geometric_partition<R: Rng + ?Sized>(p: f64, horizon: u64, rng: &mut R) -> Result<Vec<Segment>> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "switch probability {p} must lie in (0, 1]"
        )));
    }
    let geo = Geometric::new(p).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut out = Vec::new();
    let mut start = 1u64;
    while start <= horizon {
        let len = geo.sample(rng).saturating_add(1);
        let end = start.saturating_add(len - 1).min(horizon);
        out.push(Segment::new(start, end));
        start = end + 1;
    }
    Ok(out)
}

/// Geometric change points; every segment draws fresh i.i.d. uniform
/// probabilities.
pub fn gen_geometric_uniform<R: Rng + ?Sized>(
    p: f64,
    num_arms: usize,
    horizon: u64,
    rng: &mut R,
) -> Result<NssbpSpec> {
    check_dims(num_arms, horizon)?;
    let segments = geometric_partition(p, horizon, rng)?
        .into_iter()
        .map(|s| (s, uniform_theta(num_arms, rng)))
        .collect();
    NssbpSpec::new(num_arms, horizon, segments)
}

pub fn gen_stationary<R: Rng + ?Sized>(
    num_arms: usize,
    horizon: u64,
    rng: &mut R,
) -> Result<NssbpSpec> {
    check_dims(num_arms, horizon)?;
    NssbpSpec::new(
        num_arms,
        horizon,
        vec![(Segment::new(1, horizon), uniform_theta(num_arms, rng))],
    )
}

/// Geometric change points where the previous segment's best arm(s) keep
/// their probability and every other arm is redrawn.
pub fn gen_geometric_adversarial<R: Rng + ?Sized>(
    p: f64,
    num_arms: usize,
    horizon: u64,
    rng: &mut R,
) -> Result<NssbpSpec> {
    check_dims(num_arms, horizon)?;
    let partition = geometric_partition(p, horizon, rng)?;
    let mut segments: Vec<(Segment, Vec<f64>)> = Vec::with_capacity(partition.len());
    for seg in partition {
        let theta = match segments.last() {
            None => uniform_theta(num_arms, rng),
            Some((_, prev)) => {
                let best = prev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                prev.iter()
                    .map(|&x| if x == best { x } else { rng.random::<f64>() })
                    .collect()
            }
        };
        segments.push((seg, theta));
    }
    NssbpSpec::new(num_arms, horizon, segments)
}

/// Ten arms, one change at `t = 5001` of a `10^4`-step horizon. Arm 0 is best
/// before the change (0.2 vs 0.1) and keeps its 0.2 afterwards, while arm 1
/// jumps to 0.8 and everything else sits at 0.2.
pub fn adversarial_two_segment() -> NssbpSpec {
    let mut first = vec![0.1; 10];
    first[0] = 0.2;
    let mut second = vec![0.2; 10];
    second[1] = 0.8;
    NssbpSpec::new(
        10,
        10_000,
        vec![
            (Segment::new(1, 5000), first),
            (Segment::new(5001, 10_000), second),
        ],
    )
    .expect("fixed instance is valid")
}

#[cfg(test)]
mod tests {
    use super::super::pseudo_regret_step;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_covers(spec: &NssbpSpec) {
        let segs = spec.segments();
        assert_eq!(segs[0].segment.c, 1);
        assert_eq!(segs.last().unwrap().segment.d, spec.horizon());
        for w in segs.windows(2) {
            assert_eq!(w[0].segment.d + 1, w[1].segment.c);
        }
        for s in segs {
            assert!(s.theta.iter().all(|x| (0.0..=1.0).contains(x)));
        }
    }

    #[test]
    fn unit_rate_gives_unit_segments() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let spec = gen_geometric_uniform(1.0, 3, 50, &mut rng).unwrap();
        assert_eq!(spec.segments().len(), 50);
        assert!(spec.segments().iter().all(|s| s.segment.len() == 1));
        assert_ne!(spec.segments()[0].theta, spec.segments()[1].theta);
    }

    #[test]
    fn mean_segment_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = 0.001;
        let n = 10_000;
        let geo = Geometric::new(p).unwrap();
        let avg = (0..n)
            .map(|_| (geo.sample(&mut rng) + 1) as f64)
            .sum::<f64>()
            / n as f64;
        assert!((avg * p - 1.0).abs() < 0.05, "{avg}");
    }

    #[test]
    fn generators_cover_horizon() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 0..10_000u64 {
            let horizon = 1 + i % 300;
            let p = [1.0, 0.3, 0.05, 0.001][(i % 4) as usize];
            assert_covers(&gen_geometric_uniform(p, 3, horizon, &mut rng).unwrap());
            let adv = gen_geometric_adversarial(p, 3, horizon, &mut rng).unwrap();
            assert_covers(&adv);
            for w in adv.segments().windows(2) {
                for arm in w[0].argmax_arms() {
                    assert_eq!(w[0].theta[arm], w[1].theta[arm]);
                }
                for arm in 0..3 {
                    if !w[0].argmax_arms().contains(&arm) {
                        assert_ne!(w[0].theta[arm], w[1].theta[arm]);
                    }
                }
            }
        }
        assert!(gen_geometric_uniform(0.0, 2, 10, &mut rng).is_err());
        assert!(gen_geometric_uniform(1.5, 2, 10, &mut rng).is_err());
        assert!(gen_geometric_adversarial(f64::NAN, 2, 10, &mut rng).is_err());
    }

    #[test]
    fn stationary_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = gen_stationary(4, 100, &mut rng).unwrap();
        let b = gen_stationary(4, 100, &mut rng).unwrap();
        assert_eq!(a.segments().len(), 1);
        assert_eq!(a.segments()[0].segment, Segment::new(1, 100));
        assert_ne!(a, b);
        let n = 10_000;
        let mean = (0..n)
            .map(|_| gen_stationary(1, 1, &mut rng).unwrap().segments()[0].theta[0])
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 3.0 * (1.0 / 12.0 / n as f64).sqrt());
    }

    #[test]
    fn tiny_rate_is_stationary() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = gen_geometric_adversarial(1e-12, 5, 10_000, &mut rng).unwrap();
        assert_eq!(spec.segments().len(), 1);
    }

    #[test]
    fn fixed_instance() {
        let spec = adversarial_two_segment();
        assert_eq!(spec.num_arms(), 10);
        assert_eq!(spec.horizon(), 10_000);
        assert_eq!(spec.theta(1, 0).unwrap(), 0.2);
        assert_eq!(spec.theta(10_000, 0).unwrap(), 0.2);
        let s2 = &spec.segments()[1];
        assert!((s2.best_value() - s2.theta[0] - 0.6).abs() < 1e-12);
        assert!((pseudo_regret_step(&spec, 5000, 1).unwrap() - 0.1).abs() < 1e-12);
        assert!((pseudo_regret_step(&spec, 5001, 0).unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(pseudo_regret_step(&spec, 5001, 1).unwrap(), 0.0);
    }
}
