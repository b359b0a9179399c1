//! Experiment orchestration: configuration, seeding, episode execution,
//! aggregation and CSV output.

mod output;
mod run;
mod seeds;
mod timing;

pub use output::{emit_csv, emit_curves, format_sig, read_summary_csv, render_table, SummaryRow};
pub use run::{
    run_episode, run_experiment, AlgorithmSummary, CurvePoint, Execution, ExperimentSummary,
    RegretCurve,
};
pub use seeds::{derive_seed, SeedPurpose};
pub use timing::{time_active_ptw_step, StepTiming};

use serde::{Deserialize, Serialize};

use crate::env::{
    adversarial_two_segment, gen_geometric_adversarial, gen_geometric_uniform, gen_stationary,
    NssbpSpec,
};
use crate::error::{Error, Result};
use crate::policy::{ActivePtwPolicy, AlgorithmSpec, BuildContext};
use crate::ptw::MAX_DEPTH;
use rand::Rng;

/// Change-point columns of the result tables.
pub const DEFAULT_P_GRID: [f64; 4] = [0.01, 0.001, 0.0001, 0.00001];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Geometric change points, all arms redrawn at each change.
    GeometricUniform,
    /// A single segment.
    Stationary,
    /// Geometric change points, previous best arms keep their probability.
    GeometricAdversarial,
    /// The fixed ten-arm instance with one change at `t = 5001`.
    FixedAdversarial,
}

impl Regime {
    pub fn uses_switch_prob(self) -> bool {
        matches!(
            self,
            Regime::GeometricUniform | Regime::GeometricAdversarial
        )
    }
}

/// An experiment description, read from JSON.
///
/// ```json
/// {"regime": "geometric_uniform", "p": 0.001, "num_arms": 5, "horizon": 100000,
///  "episodes": 100, "master_seed": 1,
///  "algorithms": [{"type": "active_ptw"}, {"type": "thompson"}, {"type": "sw_ucb"}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub regime: Regime,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Columns for the `table` command; defaults to [`DEFAULT_P_GRID`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
    /// Required except for `fixed_adversarial`.
    #[serde(default, alias = "A", skip_serializing_if = "Option::is_none")]
    pub num_arms: Option<usize>,
    #[serde(default, alias = "T", skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    pub episodes: usize,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default)]
    pub master_seed: u64,
    /// Regret is recorded every `checkpoint_stride` steps (and at the horizon);
    /// defaults to `max(1, T / 100)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint_stride: Option<u64>,
    /// PTW depth; defaults to `⌈lb T⌉`.
    #[serde(default, alias = "D", skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    /// PTW tree prior; defaults to `A / (A + 1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

fn ceil_log2(t: u64) -> u32 {
    if t <= 1 {
        0
    } else {
        64 - (t - 1).leading_zeros()
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("malformed config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn num_arms(&self) -> usize {
        match self.regime {
            Regime::FixedAdversarial => 10,
            _ => self.num_arms.unwrap_or(0),
        }
    }

    pub fn horizon(&self) -> u64 {
        match self.regime {
            Regime::FixedAdversarial => 10_000,
            _ => self.horizon.unwrap_or(0),
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth.unwrap_or_else(|| ceil_log2(self.horizon()))
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
            .unwrap_or_else(|| ActivePtwPolicy::default_gamma(self.num_arms()))
    }

    pub fn checkpoint_stride(&self) -> u64 {
        self.checkpoint_stride
            .unwrap_or_else(|| (self.horizon() / 100).max(1))
    }

    pub fn p_grid(&self) -> Vec<f64> {
        self.p_grid
            .clone()
            .unwrap_or_else(|| DEFAULT_P_GRID.to_vec())
    }

    /// The same experiment at switch probability `p`.
    pub fn with_p(&self, p: f64) -> Self {
        Self {
            p: Some(p),
            ..self.clone()
        }
    }

    pub fn build_context(&self) -> BuildContext {
        BuildContext {
            num_arms: self.num_arms(),
            horizon: self.horizon(),
            depth: self.depth(),
            gamma: Some(self.gamma()),
            switch_prob: if self.regime.uses_switch_prob() {
                self.p
            } else {
                None
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.episodes == 0 {
            return bad("episodes must be at least 1".into());
        }
        if self.regime == Regime::FixedAdversarial {
            if self.num_arms.is_some_and(|a| a != 10) || self.horizon.is_some_and(|t| t != 10_000) {
                return bad("fixed_adversarial has num_arms = 10 and horizon = 10000".into());
            }
        } else {
            if self.num_arms.unwrap_or(0) == 0 {
                return bad("num_arms must be given and at least 1".into());
            }
            if self.horizon.unwrap_or(0) == 0 {
                return bad("horizon must be given and at least 1".into());
            }
        }
        if self.regime.uses_switch_prob() {
            match self.p {
                Some(p) if p > 0.0 && p <= 1.0 => {}
                Some(p) => return bad(format!("p = {p} must lie in (0, 1]")),
                None if self.p_grid.is_some() => {}
                None => return bad("this regime needs a switch probability p".into()),
            }
        }
        if let Some(grid) = &self.p_grid {
            if grid.is_empty() || grid.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
                return bad(format!("p_grid entries must lie in (0, 1]: {grid:?}"));
            }
        }
        let depth = self.depth();
        if depth > MAX_DEPTH {
            return bad(format!("depth {depth} exceeds {MAX_DEPTH}"));
        }
        if self.horizon() > 1u64 << depth {
            return bad(format!(
                "horizon {} exceeds 2^D = {} (D = {depth})",
                self.horizon(),
                1u64 << depth
            ));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g < 1.0) {
                return bad(format!("gamma {g} must lie in (0, 1)"));
            }
        }
        if self.checkpoint_stride == Some(0) {
            return bad("checkpoint_stride must be at least 1".into());
        }
        let probe_p = self.p.or_else(|| self.p_grid.as_ref().map(|g| g[0]));
        let ctx = BuildContext {
            switch_prob: probe_p.filter(|_| self.regime.uses_switch_prob()),
            ..self.build_context()
        };
        for alg in &self.algorithms {
            let policy = alg
                .build(&ctx)
                .map_err(|e| Error::Config(format!("{}: {e}", alg.label())))?;
            if let Some(h) = policy.horizon() {
                if h < self.horizon() {
                    return bad(format!(
                        "{} handles {h} steps but the horizon is {}",
                        alg.label(),
                        self.horizon()
                    ));
                }
            }
        }
        Ok(())
    }

    /// Draws the environment for one episode.
    pub fn generate_spec<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<NssbpSpec> {
        let (a, t) = (self.num_arms(), self.horizon());
        let p = || {
            self.p
                .ok_or_else(|| Error::Config("missing switch probability p".into()))
        };
        match self.regime {
            Regime::GeometricUniform => gen_geometric_uniform(p()?, a, t, rng),
            Regime::Stationary => gen_stationary(a, t, rng),
            Regime::GeometricAdversarial => gen_geometric_adversarial(p()?, a, t, rng),
            Regime::FixedAdversarial => Ok(adversarial_two_segment()),
        }
    }
}
