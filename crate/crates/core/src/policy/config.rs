//! Declarative algorithm descriptions used by experiment configs.

use serde::{Deserialize, Serialize};

use super::{
    ActivePtwPolicy, ConstantPolicy, KlUcbPolicy, MasterConfig, MasterUcb1Policy, Policy,
    ReferencePolicy, SlidingWindowUcbPolicy, ThompsonPolicy, Ucb1Policy, UniformPolicy,
};
use crate::error::{Error, Result};

/// One algorithm entry of an experiment config, e.g.
/// `{"type": "active_ptw", "mode": "meufe"}` or `{"type": "sw_ucb", "window": 1000}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgorithmSpec {
    ActivePtw {
        #[serde(default)]
        mode: ReferencePolicy,
        #[serde(default)]
        depth: Option<u32>,
        #[serde(default)]
        gamma: Option<f64>,
    },
    Thompson,
    Ucb1,
    SwUcb {
        /// Defaults to `round(1/p)` of the environment's switch rate.
        #[serde(default)]
        window: Option<u64>,
    },
    KlUcb,
    MasterUcb1 {
        #[serde(default = "one")]
        restart_scale: f64,
        #[serde(default = "yes")]
        tests_enabled: bool,
        #[serde(default)]
        start_order: u32,
    },
    Uniform,
    Constant {
        arm: usize,
    },
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

/// Experiment-level defaults an algorithm may need when it is built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildContext {
    pub num_arms: usize,
    pub horizon: u64,
    pub depth: u32,
    pub gamma: Option<f64>,
    /// Segment switch probability, if the environment has one.
    pub switch_prob: Option<f64>,
}

impl AlgorithmSpec {
    /// Human-readable label used as the row name of result tables.
    pub fn label(&self) -> String {
        match self {
            AlgorithmSpec::ActivePtw { mode, depth, gamma } => {
                let mut s = match mode {
                    ReferencePolicy::Meu => "ActivePTW(MEU)".to_string(),
                    ReferencePolicy::Meufe => "ActivePTW(MEUFE)".to_string(),
                };
                if let Some(d) = depth {
                    s.push_str(&format!("[D={d}]"));
                }
                if let Some(g) = gamma {
                    s.push_str(&format!("[gamma={g}]"));
                }
                s
            }
            AlgorithmSpec::Thompson => "TS".into(),
            AlgorithmSpec::Ucb1 => "UCB".into(),
            AlgorithmSpec::SwUcb { window: Some(w) } => format!("SWUCB(W={w})"),
            AlgorithmSpec::SwUcb { window: None } => "SWUCB(W=1/p)".into(),
            AlgorithmSpec::KlUcb => "KL-UCB".into(),
            AlgorithmSpec::MasterUcb1 {
                restart_scale,
                tests_enabled,
                start_order,
            } => {
                if *restart_scale == 1.0 && *tests_enabled && *start_order == 0 {
                    "MASTER".into()
                } else {
                    format!("MASTER(scale={restart_scale},tests={tests_enabled},n0={start_order})")
                }
            }
            AlgorithmSpec::Uniform => "Uniform".into(),
            AlgorithmSpec::Constant { arm } => format!("Constant({arm})"),
        }
    }

    pub fn build(&self, ctx: &BuildContext) -> Result<Box<dyn Policy>> {
        let a = ctx.num_arms;
        Ok(match self {
            AlgorithmSpec::ActivePtw { mode, depth, gamma } => {
                let gamma = gamma
                    .or(ctx.gamma)
                    .unwrap_or_else(|| ActivePtwPolicy::default_gamma(a));
                Box::new(ActivePtwPolicy::new(
                    a,
                    depth.unwrap_or(ctx.depth),
                    gamma,
                    *mode,
                )?)
            }
            AlgorithmSpec::Thompson => Box::new(ThompsonPolicy::new(a)?),
            AlgorithmSpec::Ucb1 => Box::new(Ucb1Policy::new(a)?),
            AlgorithmSpec::SwUcb { window } => {
                let w = match (window, ctx.switch_prob) {
                    (Some(w), _) => *w,
                    (None, Some(p)) if p > 0.0 => (1.0 / p).round().max(1.0) as u64,
                    (None, _) => {
                        return Err(Error::Config(
                            "sw_ucb needs an explicit window when the environment has no switch probability".into(),
                        ))
                    }
                };
                Box::new(SlidingWindowUcbPolicy::new(a, w)?)
            }
            AlgorithmSpec::KlUcb => Box::new(KlUcbPolicy::new(a)?),
            AlgorithmSpec::MasterUcb1 {
                restart_scale,
                tests_enabled,
                start_order,
            } => {
                let cfg = MasterConfig {
                    horizon: ctx.horizon,
                    restart_scale: *restart_scale,
                    tests_enabled: *tests_enabled,
                    start_order: *start_order,
                };
                Box::new(MasterUcb1Policy::new(a, cfg)?)
            }
            AlgorithmSpec::Uniform => Box::new(UniformPolicy::new(a)?),
            AlgorithmSpec::Constant { arm } => Box::new(ConstantPolicy::new(a, *arm)?),
        })
    }
}
