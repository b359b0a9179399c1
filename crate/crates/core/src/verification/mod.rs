//! Brute-force oracles and bound functions.
//!
//! Everything here is deliberately slow and direct: partitions are
//! enumerated explicitly and KT probabilities are accumulated as sequential
//! products, so these routines share no code path with [`crate::ptw`].

pub mod suites;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logspace::{log2_sum, LogProb};
use crate::ptw::{Segment, SegmentPosterior, SegmentWeight};
use std::collections::HashMap;

/// `|C_6|` is about 2·10^11, so explicit enumeration stops at depth 5.
pub const MAX_ENUMERATION_DEPTH: u32 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPartition {
    pub segments: Vec<Segment>,
    pub prior: f64,
}

/// Every binary temporal partition of `1..=2^depth` with its prior weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionEnumeration {
    pub depth: u32,
    pub partitions: Vec<WeightedPartition>,
}

impl PartitionEnumeration {
    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn total_prior(&self) -> f64 {
        self.partitions.iter().map(|p| p.prior).sum()
    }
}

fn enumerate_from(start: u64, depth: u32, gamma: f64) -> Vec<WeightedPartition> {
    let whole = Segment::new(start, start + (1u64 << depth) - 1);
    if depth == 0 {
        return vec![WeightedPartition {
            segments: vec![whole],
            prior: 1.0,
        }];
    }
    let left = enumerate_from(start, depth - 1, gamma);
    let right = enumerate_from(start + (1u64 << (depth - 1)), depth - 1, gamma);
    let mut out = Vec::with_capacity(1 + left.len() * right.len());
    out.push(WeightedPartition {
        segments: vec![whole],
        prior: gamma,
    });
    for l in &left {
        for r in &right {
            let mut segments = l.segments.clone();
            segments.extend_from_slice(&r.segments);
            out.push(WeightedPartition {
                segments,
                prior: (1.0 - gamma) * l.prior * r.prior,
            });
        }
    }
    out
}

pub fn enumerate_partitions(depth: u32, gamma: f64) -> Result<PartitionEnumeration> {
    if depth > MAX_ENUMERATION_DEPTH {
        return Err(Error::DepthTooLarge {
            depth,
            max: MAX_ENUMERATION_DEPTH,
        });
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma {gamma} must lie in (0, 1)"
        )));
    }
    Ok(PartitionEnumeration {
        depth,
        partitions: enumerate_from(1, depth, gamma),
    })
}

/// `lb KTE` of the data at times inside `seg` (and `<= actions.len()`),
/// accumulated as a product of sequential KT predictions.
pub fn segment_kte_log(seg: Segment, actions: &[usize], percepts: &[bool], num_arms: usize) -> f64 {
    let mut zeros = vec![0u64; num_arms];
    let mut ones = vec![0u64; num_arms];
    let mut bits = 0.0;
    let end = (seg.d as usize).min(actions.len());
    for idx in (seg.c as usize - 1)..end {
        let a = actions[idx];
        let n = (zeros[a] + ones[a]) as f64;
        if percepts[idx] {
            bits += ((ones[a] as f64 + 0.5) / (n + 1.0)).log2();
            ones[a] += 1;
        } else {
            bits += ((zeros[a] as f64 + 0.5) / (n + 1.0)).log2();
            zeros[a] += 1;
        }
    }
    bits
}

fn check_history(actions: &[usize], percepts: &[bool], depth: u32) -> Result<usize> {
    if actions.len() != percepts.len() {
        return Err(Error::LengthMismatch {
            left: actions.len(),
            right: percepts.len(),
        });
    }
    if actions.len() as u64 > 1u64 << depth {
        return Err(Error::InvalidLength(format!(
            "{} steps exceed the horizon 2^{depth}",
            actions.len()
        )));
    }
    Ok(actions.iter().copied().max().map_or(1, |m| m + 1))
}

/// Log of prior × likelihood for every partition, in enumeration order.
fn partition_joint_logs(
    enumeration: &PartitionEnumeration,
    actions: &[usize],
    percepts: &[bool],
    num_arms: usize,
) -> Vec<f64> {
    let mut cache: HashMap<Segment, f64> = HashMap::new();
    enumeration
        .partitions
        .iter()
        .map(|p| {
            p.prior.log2()
                + p.segments
                    .iter()
                    .map(|s| {
                        *cache
                            .entry(*s)
                            .or_insert_with(|| segment_kte_log(*s, actions, percepts, num_arms))
                    })
                    .sum::<f64>()
        })
        .collect()
}

/// Direct evaluation of the PTW-KTE mixture by summing over all partitions.
pub fn brute_force_marginal(
    actions: &[usize],
    percepts: &[bool],
    depth: u32,
    gamma: f64,
) -> Result<LogProb> {
    let num_arms = check_history(actions, percepts, depth)?;
    let enumeration = enumerate_partitions(depth, gamma)?;
    Ok(LogProb(log2_sum(&partition_joint_logs(
        &enumeration,
        actions,
        percepts,
        num_arms,
    ))))
}

/// Posterior of each active segment at time `t`, conditioned on the first
/// `t - 1` steps of the history: the summed posterior of every partition
/// containing the segment.
pub fn brute_force_segment_posterior(
    actions: &[usize],
    percepts: &[bool],
    depth: u32,
    gamma: f64,
    t: u64,
) -> Result<SegmentPosterior> {
    if t == 0 || t > 1u64 << depth || (t - 1) as usize > actions.len() {
        return Err(Error::OutOfHorizon {
            time: t,
            horizon: 1u64 << depth.min(62),
        });
    }
    let used = (t - 1) as usize;
    let (actions, percepts) = (&actions[..used], &percepts[..used.min(percepts.len())]);
    let num_arms = check_history(actions, percepts, depth)?;
    let enumeration = enumerate_partitions(depth, gamma)?;
    let joint = partition_joint_logs(&enumeration, actions, percepts, num_arms);
    let total = log2_sum(&joint);
    let active = active_segments_by_definition(t, &enumeration);
    let entries = active
        .into_iter()
        .map(|segment| {
            let weight = enumeration
                .partitions
                .iter()
                .zip(&joint)
                .filter(|(p, _)| p.segments.contains(&segment))
                .map(|(_, &j)| (j - total).exp2())
                .sum();
            SegmentWeight {
                segment,
                scale: segment.len().trailing_zeros(),
                weight,
            }
        })
        .collect();
    Ok(SegmentPosterior { entries })
}

/// Segments containing `t` that occur in some enumerated partition, longest
/// first.
pub fn active_segments_by_definition(t: u64, enumeration: &PartitionEnumeration) -> Vec<Segment> {
    let mut found: Vec<Segment> = enumeration
        .partitions
        .iter()
        .flat_map(|p| p.segments.iter().copied())
        .filter(|s| s.contains(t))
        .collect();
    found.sort_by(|a, b| b.len().cmp(&a.len()).then(a.c.cmp(&b.c)));
    found.dedup();
    found
}

/// Recursive descent through the partition tree keeping every node that
/// contains `t`.
pub fn active_segments_recursive(t: u64, depth: u32) -> Vec<Segment> {
    fn walk(node: Segment, t: u64, out: &mut Vec<Segment>) {
        if !node.contains(t) {
            return;
        }
        out.push(node);
        if node.len() > 1 {
            let mid = node.c + node.len() / 2;
            walk(Segment::new(node.c, mid - 1), t, out);
            walk(Segment::new(mid, node.d), t, out);
        }
    }
    let mut out = Vec::new();
    walk(Segment::new(1, 1u64 << depth), t, &mut out);
    out
}

fn ceil_log2(t: u64) -> u64 {
    if t <= 1 {
        0
    } else {
        64 - u64::from((t - 1).leading_zeros())
    }
}

/// Worst-case redundancy of PTW-KTE (with γ = ½) against an NSSBP whose
/// partition has `num_segments` segments intersecting `1..=t`.
pub fn theorem1_bound(t: u64, num_arms: u64, num_segments: u64) -> Result<f64> {
    if t == 0 || num_arms == 0 || num_segments == 0 {
        return Err(Error::InvalidParameter(format!(
            "theorem bound needs t, A, |P| >= 1 (got {t}, {num_arms}, {num_segments})"
        )));
    }
    let levels = ceil_log2(t) + 1;
    let cover = num_segments * levels;
    let per_block = t.div_ceil(num_arms * cover);
    let a = num_arms as f64;
    Ok(cover as f64 * (0.5 * a * (per_block as f64).log2() + a + 2.0))
}

/// Tail bound on `P[|θ - θ̄| >= ε | S_t = s]` under the KT posterior,
/// `1.25 (t-1)^{3/2} / sqrt((s-½)(t-s+½)) · exp(-2 (t-1) ε²)`, clamped to 1.
pub fn kt_concentration_bound(t: u64, s: u64, eps: f64) -> Result<f64> {
    if t < 4 || s < 2 || s > t - 2 || eps.is_nan() || eps <= 0.0 {
        return Err(Error::Domain(format!(
            "concentration bound needs 2 <= s <= t-2 and eps > 0 (t={t}, s={s}, eps={eps})"
        )));
    }
    let (t, s) = (t as f64, s as f64);
    let bound = 1.25 * (t - 1.0).powf(1.5) / ((s - 0.5) * (t - s + 0.5)).sqrt()
        * (-2.0 * (t - 1.0) * eps * eps).exp();
    Ok(bound.clamp(0.0, 1.0))
}

/// Forced-exploration guarantee for MEUFE on one segment of length `n`:
/// with probability at least `1 - failure_prob` every arm is explored at
/// least `min_count` times. A negative `min_count` means the bound says
/// nothing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplorationBound {
    pub min_count: i64,
    pub failure_prob: f64,
}

impl ExplorationBound {
    /// Informative when it promises at least one exploration with
    /// probability above zero.
    pub fn is_informative(&self) -> bool {
        self.min_count >= 1 && self.failure_prob < 1.0
    }
}

pub fn exploration_count_bound(n: u64, num_arms: u64, eps: f64) -> Result<ExplorationBound> {
    if n == 0 || num_arms == 0 || eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "exploration bound needs n, A >= 1 and eps > 0 (got {n}, {num_arms}, {eps})"
        )));
    }
    let nf = n as f64;
    let min_count = (nf.sqrt() / num_arms as f64 - eps * nf).floor() as i64;
    let failure_prob = 2.0 * num_arms as f64 * (-2.0 * eps * eps * nf).exp();
    Ok(ExplorationBound {
        min_count,
        failure_prob,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(c: u64, d: u64) -> Segment {
        Segment::new(c, d)
    }

    #[test]
    fn partition_counts_and_weights() {
        let c1 = enumerate_partitions(1, 0.5).unwrap();
        assert_eq!(c1.len(), 2);
        let c2 = enumerate_partitions(2, 0.5).unwrap();
        assert_eq!(c2.len(), 5);
        let sets: Vec<Vec<Segment>> = c2
            .partitions
            .iter()
            .map(|p| {
                let mut s = p.segments.clone();
                s.sort();
                s
            })
            .collect();
        assert!(sets.contains(&vec![seg(1, 4)]));
        assert!(sets.contains(&vec![seg(1, 2), seg(3, 4)]));
        assert!(sets.contains(&vec![seg(1, 1), seg(2, 2), seg(3, 4)]));
        assert!(sets.contains(&vec![seg(1, 2), seg(3, 3), seg(4, 4)]));
        assert!(sets.contains(&vec![seg(1, 1), seg(2, 2), seg(3, 3), seg(4, 4)]));
        assert_eq!(enumerate_partitions(3, 0.5).unwrap().len(), 26);
        assert_eq!(enumerate_partitions(4, 0.5).unwrap().len(), 677);
        for gamma in [0.1, 0.5, 0.7, 0.9] {
            for d in 0..=4 {
                let e = enumerate_partitions(d, gamma).unwrap();
                assert!((e.total_prior() - 1.0).abs() < 1e-12);
            }
        }
        assert!(matches!(
            enumerate_partitions(6, 0.5),
            Err(Error::DepthTooLarge { .. })
        ));
    }

    #[test]
    fn brute_force_marginal_examples() {
        assert_eq!(brute_force_marginal(&[], &[], 2, 0.5).unwrap().bits(), 0.0);
        let m = brute_force_marginal(&[0, 0], &[true, true], 1, 0.5).unwrap();
        assert!((m.bits() - (5.0f64 / 16.0).log2()).abs() < 1e-12);
        assert!(brute_force_marginal(&[0, 0, 0], &[true; 3], 1, 0.5).is_err());
        assert!(brute_force_marginal(&[0, 0], &[true], 1, 0.5).is_err());
    }

    #[test]
    fn brute_force_prior_posterior_telescopes() {
        for (gamma, depth) in [(0.5, 2u32), (0.5, 3), (0.75, 4)] {
            let post = brute_force_segment_posterior(&[], &[], depth, gamma, 1).unwrap();
            let mut expected: Vec<f64> = (0..depth)
                .map(|k| gamma * (1.0 - gamma).powi(k as i32))
                .collect();
            expected.push((1.0 - gamma).powi(depth as i32));
            for (e, w) in post.entries.iter().zip(expected) {
                assert!((e.weight - w).abs() < 1e-12);
            }
            assert!((post.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn definition_and_recursive_active_segments_agree_on_example() {
        let c2 = enumerate_partitions(2, 0.5).unwrap();
        let expected = vec![seg(1, 4), seg(3, 4), seg(3, 3)];
        assert_eq!(active_segments_by_definition(3, &c2), expected);
        assert_eq!(active_segments_recursive(3, 2), expected);
    }

    #[test]
    fn theorem1_examples() {
        assert_eq!(theorem1_bound(1, 2, 1).unwrap(), 4.0);
        // Each extra segment adds (A+2)(⌈lb t⌉+1) bits, but the ceiling inside the
        // log can drop enough to outweigh that: the bound is only roughly
        // increasing in |P|.
        assert!((theorem1_bound(100, 3, 4).unwrap() - 208.0).abs() < 1e-9);
        assert!((theorem1_bound(100, 3, 5).unwrap() - 200.0).abs() < 1e-9);
        for p in 1..20 {
            assert!(theorem1_bound(7, 3, p + 1).unwrap() >= theorem1_bound(7, 3, p).unwrap());
        }
        assert!(theorem1_bound(0, 2, 1).is_err());
    }

    #[test]
    fn concentration_examples() {
        assert!(kt_concentration_bound(100, 50, 0.5).unwrap() < 1e-18);
        let mut prev = f64::INFINITY;
        for k in 1..50 {
            let b = kt_concentration_bound(150, 40, k as f64 * 0.01).unwrap();
            assert!(b <= prev);
            prev = b;
        }
        assert!(matches!(
            kt_concentration_bound(10, 1, 0.1),
            Err(Error::Domain(_))
        ));
        assert!(kt_concentration_bound(10, 9, 0.1).is_err());
        assert!(kt_concentration_bound(10, 5, 0.0).is_err());
    }

    #[test]
    fn exploration_examples() {
        let b = exploration_count_bound(1 << 16, 5, 0.005).unwrap();
        assert_eq!(b.min_count, (51.2f64 - 327.68).floor() as i64);
        assert!(!b.is_informative());
        let mut prev = f64::INFINITY;
        for n in [10u64, 100, 1000, 10_000] {
            let b = exploration_count_bound(n, 3, 0.05).unwrap();
            assert!(b.failure_prob < prev);
            prev = b.failure_prob;
        }
        let b = exploration_count_bound(1 << 16, 1, 0.003).unwrap();
        assert_eq!(b.min_count, 59);
        assert!(b.is_informative());
    }
}
