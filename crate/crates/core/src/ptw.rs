//! Partition tree weighting over the per-arm KT environment.
//!
//! [`PtwState`] mixes the KTE model over every binary temporal partition of
//! `1..=2^depth`, weighting a partition by `γ^stops (1-γ)^splits` (scale-0
//! leaves are free). Only the path of nodes containing the current time is
//! stored, one [`Level`] per scale, so an update costs `O(depth)` plus an
//! amortised `O(num_arms)` for resetting completed nodes.
//!
//! After absorbing `t` percepts the levels describe the nodes that contain
//! time `t + 1`, which are exactly the segments the policy samples from when
//! it acts next. A node that starts at `t + 1` therefore has empty statistics.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kt::KteState;
use crate::logspace::{log2_add, LogProb};

/// Largest depth whose horizon `2^depth` fits the time counter.
pub const MAX_DEPTH: u32 = 62;

/// A closed interval of time steps `c..=d` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub c: u64,
    pub d: u64,
}

#[allow(clippy::len_without_is_empty)]
impl Segment {
    pub fn new(c: u64, d: u64) -> Self {
        debug_assert!(1 <= c && c <= d);
        Self { c, d }
    }

    pub fn len(&self) -> u64 {
        self.d - self.c + 1
    }

    pub fn contains(&self, t: u64) -> bool {
        self.c <= t && t <= self.d
    }
}

pub fn horizon(depth: u32) -> u64 {
    1u64 << depth
}

/// The `depth + 1` nodes of the depth-`depth` partition tree containing `t`,
/// ordered from the root (scale `depth`) down to the unit leaf.
///
/// Walks the binary digits of `t - 1`, most significant first: a 0 descends
/// into the left half, a 1 into the right half.
pub fn active_segments(t: u64, depth: u32) -> Result<Vec<Segment>> {
    if depth > MAX_DEPTH || t == 0 || t > horizon(depth) {
        return Err(Error::OutOfHorizon {
            time: t,
            horizon: horizon(depth.min(MAX_DEPTH)),
        });
    }
    let bits = t - 1;
    let mut origin = 1u64;
    let mut out = Vec::with_capacity(depth as usize + 1);
    for k in (0..=depth).rev() {
        out.push(Segment::new(origin, origin + (1u64 << k) - 1));
        if k > 0 && (bits >> (k - 1)) & 1 == 1 {
            origin += 1u64 << (k - 1);
        }
    }
    Ok(out)
}

/// Statistics of the node at one scale of the active path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    /// Per-arm counts of the percepts inside this node so far.
    pub kte: KteState,
    /// `lb KTE` of the node's data.
    pub kte_log: f64,
    /// `lb PTW_i` of the node's data.
    pub ptw_log: f64,
    /// `lb PTW_{i-1}` of the completed left child, or 0 while the left child
    /// is still the active one.
    pub buffer_log: f64,
}

impl Level {
    fn new(num_arms: usize) -> Self {
        Self {
            kte: KteState::new(num_arms),
            kte_log: 0.0,
            ptw_log: 0.0,
            buffer_log: 0.0,
        }
    }

    fn reset(&mut self) {
        self.kte.clear();
        self.kte_log = 0.0;
        self.ptw_log = 0.0;
        self.buffer_log = 0.0;
    }
}

/// Incremental PTW-KTE mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtwState {
    depth: u32,
    gamma: f64,
    log_stop: f64,
    log_split: f64,
    time: u64,
    /// Indexed by scale: `levels[i]` is the active node of length `2^i`.
    levels: Vec<Level>,
}

impl PtwState {
    pub fn new(depth: u32, num_arms: usize, gamma: f64) -> Result<Self> {
        if depth > MAX_DEPTH {
            return Err(Error::InvalidParameter(format!(
                "depth {depth} exceeds {MAX_DEPTH}"
            )));
        }
        if num_arms == 0 {
            return Err(Error::InvalidParameter("num_arms must be >= 1".into()));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma {gamma} must lie in (0, 1)"
            )));
        }
        Ok(Self {
            depth,
            gamma,
            log_stop: gamma.log2(),
            log_split: (1.0 - gamma).log2(),
            time: 0,
            levels: (0..=depth).map(|_| Level::new(num_arms)).collect(),
        })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn num_arms(&self) -> usize {
        self.levels[0].kte.num_arms()
    }

    /// Number of percepts absorbed.
    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn horizon(&self) -> u64 {
        horizon(self.depth)
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Absorb the percept received for `arm` at time `self.time() + 1`.
    pub fn update(&mut self, arm: usize, percept: bool) -> Result<()> {
        if self.time >= self.horizon() {
            return Err(Error::OutOfHorizon {
                time: self.time + 1,
                horizon: self.horizon(),
            });
        }
        let num_arms = self.num_arms();
        if arm >= num_arms {
            return Err(Error::InvalidArm { arm, num_arms });
        }

        for level in &mut self.levels {
            // Arm index was validated above.
            let stats = &level.kte.arms()[arm];
            level.kte_log += stats.predict(percept).bits();
            level.kte.update(arm, percept)?;
        }
        self.levels[0].ptw_log = self.levels[0].kte_log;
        for i in 1..self.levels.len() {
            let child = self.levels[i - 1].ptw_log;
            let level = &mut self.levels[i];
            level.ptw_log = log2_add(
                self.log_stop + level.kte_log,
                self.log_split + level.buffer_log + child,
            );
        }

        self.time += 1;
        if self.time < self.horizon() {
            // Nodes of scale <= k end at `time`; the scale-k node was the left
            // child of its parent, which keeps running.
            let k = self.time.trailing_zeros() as usize;
            self.levels[k + 1].buffer_log = self.levels[k].ptw_log;
            for level in &mut self.levels[..=k] {
                level.reset();
            }
        }
        Ok(())
    }

    /// `lb PTW-KTE_depth(e_{1:t} || a_{1:t})`.
    pub fn log_marginal(&self) -> LogProb {
        LogProb(self.levels[self.depth as usize].ptw_log)
    }

    /// `lb KTE` of all data absorbed so far (the single-segment model).
    pub fn kte_log_marginal(&self) -> LogProb {
        LogProb(self.levels[self.depth as usize].kte_log)
    }

    /// Active segments for the next time step, root first.
    pub fn next_active_segments(&self) -> Result<Vec<Segment>> {
        active_segments(self.time + 1, self.depth)
    }

    /// Posterior weights of the next step's active nodes as `(scale, weight)`,
    /// root first.
    ///
    /// The root stops with posterior probability `γ KTE / PTW`; conditional on
    /// splitting, the sibling off the path factors out and the same ratio
    /// applies one scale down. The remaining mass is tracked in log space so
    /// deep trees do not lose precision to `1 - Σ` cancellation.
    pub fn scale_weights(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        let mut log_rest = 0.0f64;
        (0..=self.depth).rev().map(move |scale| {
            if scale == 0 {
                return (0, log_rest.exp2());
            }
            let level = &self.levels[scale as usize];
            let weight = (log_rest + self.log_stop + level.kte_log - level.ptw_log).exp2();
            log_rest += self.log_split + level.buffer_log + self.levels[scale as usize - 1].ptw_log
                - level.ptw_log;
            (scale, weight)
        })
    }

    /// Posterior over the active segments of time `self.time() + 1`, given
    /// every percept absorbed so far.
    pub fn segment_posterior(&self) -> Result<SegmentPosterior> {
        let segments = self.next_active_segments()?;
        let entries = segments
            .into_iter()
            .zip(self.scale_weights())
            .map(|(segment, (scale, weight))| SegmentWeight {
                segment,
                scale,
                weight,
            })
            .collect();
        Ok(SegmentPosterior { entries })
    }

    /// Draw the scale of an active segment from the posterior without
    /// materialising it. Consumes one uniform unless `depth == 0`; the draw
    /// matches [`SegmentPosterior::sample`] on the same stream.
    pub fn sample_scale(&self, rng: &mut dyn RngCore) -> Result<u32> {
        if self.time >= self.horizon() {
            return Err(Error::OutOfHorizon {
                time: self.time + 1,
                horizon: self.horizon(),
            });
        }
        if self.depth == 0 {
            return Ok(0);
        }
        let mut u = rng.random::<f64>();
        let mut last_positive = 0;
        for (scale, weight) in self.scale_weights() {
            if u < weight {
                return Ok(scale);
            }
            if weight > 0.0 {
                last_positive = scale;
            }
            u -= weight;
        }
        Ok(last_positive)
    }

    /// Per-arm counts accumulated inside `seg`, which must be active for the
    /// next time step.
    pub fn segment_arm_stats(&self, seg: Segment) -> Result<&KteState> {
        let scale = seg.len().trailing_zeros();
        let active = self.next_active_segments()?;
        if seg.len().is_power_of_two() && scale <= self.depth {
            let k = (self.depth - scale) as usize;
            if active[k] == seg {
                return Ok(&self.levels[scale as usize].kte);
            }
        }
        Err(Error::NotActive { c: seg.c, d: seg.d })
    }

    /// Counts of the active node at `scale`.
    pub fn level_stats(&self, scale: u32) -> &KteState {
        &self.levels[scale as usize].kte
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentWeight {
    pub segment: Segment,
    pub scale: u32,
    pub weight: f64,
}

/// Posterior weights of the `depth + 1` active segments, root first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentPosterior {
    pub entries: Vec<SegmentWeight>,
}

impl SegmentPosterior {
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    /// Categorical draw. A single-entry posterior consumes no randomness.
    pub fn sample(&self, rng: &mut dyn RngCore) -> SegmentWeight {
        if self.entries.len() == 1 {
            return self.entries[0];
        }
        let mut u = rng.random::<f64>();
        for entry in &self.entries {
            if u < entry.weight {
                return *entry;
            }
            u -= entry.weight;
        }
        // Rounding left `u` just past the last positive weight.
        *self
            .entries
            .iter()
            .rev()
            .find(|e| e.weight > 0.0)
            .unwrap_or(&self.entries[0])
    }
}
