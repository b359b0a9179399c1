use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::seeds::{derive_seed, SeedPurpose};
use super::ExperimentConfig;
use crate::env::{CrnStream, NssbpSpec};
use crate::error::{Error, Result};
use crate::policy::Policy;

/// Cumulative pseudo-regret sampled at checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretCurve {
    /// Times `stride, 2·stride, ..` plus the horizon.
    pub times: Vec<u64>,
    pub regret: Vec<f64>,
}

impl RegretCurve {
    pub fn final_regret(&self) -> f64 {
        self.regret.last().copied().unwrap_or(0.0)
    }
}

/// Plays `policy` against `spec` for the full horizon, drawing percepts from
/// `env`.
pub fn run_episode(
    policy: &mut dyn Policy,
    spec: &NssbpSpec,
    env: &CrnStream,
    rng: &mut dyn RngCore,
    stride: u64,
) -> Result<RegretCurve> {
    if stride == 0 {
        return Err(Error::InvalidParameter(
            "checkpoint stride must be at least 1".into(),
        ));
    }
    if policy.num_arms() != spec.num_arms() {
        return Err(Error::InvalidParameter(format!(
            "{} plays {} arms but the environment has {}",
            policy.name(),
            policy.num_arms(),
            spec.num_arms()
        )));
    }
    if let Some(h) = policy.horizon() {
        if h < spec.horizon() {
            return Err(Error::OutOfHorizon {
                time: spec.horizon(),
                horizon: h,
            });
        }
    }
    let horizon = spec.horizon();
    let n_points = horizon / stride + u64::from(!horizon.is_multiple_of(stride));
    let mut curve = RegretCurve {
        times: Vec::with_capacity(n_points as usize),
        regret: Vec::with_capacity(n_points as usize),
    };
    let mut total = 0.0;
    let mut seg_idx = 0usize;
    let segments = spec.segments();
    for t in 1..=horizon {
        while segments[seg_idx].segment.d < t {
            seg_idx += 1;
        }
        let params = &segments[seg_idx];
        let arm = policy.select_action(rng)?;
        let theta = params.theta[arm];
        policy.observe(arm, env.uniform(t, arm) < theta)?;
        total += params.best_value() - theta;
        if t % stride == 0 || t == horizon {
            curve.times.push(t);
            curve.regret.push(total);
        }
    }
    Ok(curve)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    /// Episodes spread over the global worker pool. Both parallel variants
    /// run serially when the `parallel` feature is off.
    #[default]
    Parallel,
    /// Episodes spread over a dedicated pool of this many threads.
    ParallelWith(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: u64,
    pub mean_regret: f64,
    pub ci95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub episodes: usize,
    pub mean_final_regret: f64,
    pub ci95: f64,
    pub curve: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub config: ExperimentConfig,
    pub rows: Vec<AlgorithmSummary>,
}

impl ExperimentSummary {
    pub fn row(&self, algorithm: &str) -> Option<&AlgorithmSummary> {
        self.rows.iter().find(|r| r.algorithm == algorithm)
    }
}

/// Welford accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// `1.96 · s / √n` with the sample standard deviation; 0 for one sample.
    fn ci95(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let sd = (self.m2 / (self.n - 1) as f64).sqrt();
        1.96 * sd / (self.n as f64).sqrt()
    }
}

fn run_one(cfg: &ExperimentConfig, labels: &[String], episode: u64) -> Result<Vec<RegretCurve>> {
    let mut spec_rng =
        ChaCha8Rng::seed_from_u64(derive_seed(cfg.master_seed, SeedPurpose::Spec, episode));
    let spec = cfg.generate_spec(&mut spec_rng)?;
    let env = CrnStream::new(derive_seed(cfg.master_seed, SeedPurpose::Percepts, episode));
    let ctx = cfg.build_context();
    cfg.algorithms
        .iter()
        .zip(labels)
        .map(|(alg, label)| {
            let mut policy = alg.build(&ctx)?;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
                cfg.master_seed,
                SeedPurpose::Policy(label),
                episode,
            ));
            run_episode(&mut policy, &spec, &env, &mut rng, cfg.checkpoint_stride())
        })
        .collect()
}

#[cfg(feature = "parallel")]
fn run_all(
    cfg: &ExperimentConfig,
    labels: &[String],
    execution: Execution,
) -> Result<Vec<Vec<RegretCurve>>> {
    use rayon::prelude::*;
    let work = || {
        (0..cfg.episodes as u64)
            .into_par_iter()
            .map(|e| run_one(cfg, labels, e))
            .collect::<Result<Vec<_>>>()
    };
    match execution {
        Execution::Serial => (0..cfg.episodes as u64)
            .map(|e| run_one(cfg, labels, e))
            .collect(),
        Execution::Parallel => work(),
        Execution::ParallelWith(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(work),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_all(
    cfg: &ExperimentConfig,
    labels: &[String],
    _execution: Execution,
) -> Result<Vec<Vec<RegretCurve>>> {
    (0..cfg.episodes as u64)
        .map(|e| run_one(cfg, labels, e))
        .collect()
}

/// Runs every algorithm on every episode and aggregates in episode order, so
/// the result does not depend on `execution`.
///
/// Episode `i` draws its environment and its percept variates from seeds
/// derived from `(master_seed, i)`; all algorithms share them. Each algorithm
/// gets its own policy stream keyed by its label, so duplicate entries
/// produce identical rows.
pub fn run_experiment(cfg: &ExperimentConfig, execution: Execution) -> Result<ExperimentSummary> {
    cfg.validate()?;
    let labels: Vec<String> = cfg.algorithms.iter().map(|a| a.label()).collect();
    let episodes = run_all(cfg, &labels, execution)?;

    let rows = labels
        .iter()
        .enumerate()
        .map(|(k, label)| {
            let times = &episodes[0][k].times;
            let mut points = vec![Moments::default(); times.len()];
            for curves in &episodes {
                for (m, &x) in points.iter_mut().zip(&curves[k].regret) {
                    m.push(x);
                }
            }
            let last = points.last().copied().unwrap_or_default();
            AlgorithmSummary {
                algorithm: label.clone(),
                episodes: cfg.episodes,
                mean_final_regret: last.mean,
                ci95: last.ci95(),
                curve: times
                    .iter()
                    .zip(&points)
                    .map(|(&t, m)| CurvePoint {
                        t,
                        mean_regret: m.mean,
                        ci95: m.ci95(),
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(ExperimentSummary {
        config: cfg.clone(),
        rows,
    })
}
