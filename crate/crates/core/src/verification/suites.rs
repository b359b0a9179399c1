//! Randomised checks of the fast implementations against the oracles and
//! bounds in the parent module. Each suite returns a [`SuiteReport`] instead
//! of panicking so that callers can print one line per suite.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::Serialize;

use super::{
    active_segments_by_definition, active_segments_recursive, brute_force_marginal,
    brute_force_segment_posterior, enumerate_partitions, exploration_count_bound,
    kt_concentration_bound, theorem1_bound,
};
use crate::env::gen_geometric_uniform;
use crate::error::Result;
use crate::kt::{kt_redundancy_bound, kte_redundancy_bound, KtStats, KteState};
use crate::policy::{ActivePtwPolicy, Policy, ReferencePolicy};
use crate::ptw::{active_segments, PtwState};

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteReport {
    fn finish(name: &str, start: Instant, outcome: Result<(bool, String)>) -> Self {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        Self {
            name: name.into(),
            passed,
            detail,
            elapsed: start.elapsed(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Sizes of the randomised suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub oracle_sequences: usize,
    pub normalization_steps: u64,
    pub normalization_depth: u32,
    pub kt_sequences: usize,
    pub kt_max_len: u64,
    pub kte_traces: usize,
    pub theorem_specs: usize,
    pub theorem_max_depth: u32,
    pub concentration_draws: usize,
    pub exploration_episodes: usize,
}

impl SuiteConfig {
    pub fn full() -> Self {
        Self {
            seed: 2024,
            oracle_sequences: 100,
            normalization_steps: 1_000_000,
            normalization_depth: 20,
            kt_sequences: 1000,
            kt_max_len: 4096,
            kte_traces: 200,
            theorem_specs: 200,
            theorem_max_depth: 10,
            concentration_draws: 1_000_000,
            exploration_episodes: 100,
        }
    }

    pub fn quick() -> Self {
        Self {
            seed: 7,
            oracle_sequences: 5,
            normalization_steps: 20_000,
            normalization_depth: 16,
            kt_sequences: 50,
            kt_max_len: 512,
            kte_traces: 20,
            theorem_specs: 20,
            theorem_max_depth: 7,
            concentration_draws: 20_000,
            exploration_episodes: 10,
        }
    }
}

fn random_history(len: usize, num_arms: usize, rng: &mut impl Rng) -> (Vec<usize>, Vec<bool>) {
    // Piecewise-constant biases with one random change make the posterior
    // put visible mass on short segments.
    let change = rng.random_range(0..=len);
    let before: Vec<f64> = (0..num_arms).map(|_| rng.random()).collect();
    let after: Vec<f64> = (0..num_arms).map(|_| rng.random()).collect();
    let mut actions = Vec::with_capacity(len);
    let mut percepts = Vec::with_capacity(len);
    for i in 0..len {
        let a = rng.random_range(0..num_arms);
        let theta = if i < change { before[a] } else { after[a] };
        actions.push(a);
        percepts.push(rng.random::<f64>() < theta);
    }
    (actions, percepts)
}

/// Incremental PTW marginal and segment posterior against exhaustive
/// enumeration, at every prefix of random histories.
pub fn oracle_equivalence(cfg: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let (mut worst_bits, mut worst_weight, mut checks) = (0.0f64, 0.0f64, 0u64);
        for depth in 1..=4u32 {
            for num_arms in 1..=3usize {
                let mut gammas = vec![0.5, ActivePtwPolicy::default_gamma(num_arms)];
                gammas.dedup();
                for &gamma in &gammas {
                    for _ in 0..cfg.oracle_sequences {
                        let len = 1usize << depth;
                        let (actions, percepts) = random_history(len, num_arms, &mut rng);
                        let mut ptw = PtwState::new(depth, num_arms, gamma)?;
                        for t in 0..=len {
                            if t > 0 {
                                ptw.update(actions[t - 1], percepts[t - 1])?;
                            }
                            let oracle =
                                brute_force_marginal(&actions[..t], &percepts[..t], depth, gamma)?;
                            worst_bits =
                                worst_bits.max((oracle.bits() - ptw.log_marginal().bits()).abs());
                            if t < len {
                                let fast = ptw.segment_posterior()?;
                                let slow = brute_force_segment_posterior(
                                    &actions,
                                    &percepts,
                                    depth,
                                    gamma,
                                    t as u64 + 1,
                                )?;
                                if fast.entries.len() != slow.entries.len() {
                                    return Ok((
                                        false,
                                        format!("active set size differs at t={}", t + 1),
                                    ));
                                }
                                for (f, s) in fast.entries.iter().zip(&slow.entries) {
                                    if f.segment != s.segment {
                                        return Ok((
                                            false,
                                            format!("segment order differs at t={}", t + 1),
                                        ));
                                    }
                                    worst_weight = worst_weight.max((f.weight - s.weight).abs());
                                }
                            }
                            checks += 1;
                        }
                    }
                }
            }
        }
        let passed = worst_bits <= 1e-9 && worst_weight <= 1e-9;
        Ok((
            passed,
            format!("{checks} prefixes, max |Δ marginal| = {worst_bits:.2e} bits, max |Δ weight| = {worst_weight:.2e}"),
        ))
    })();
    SuiteReport::finish("oracle equivalence", start, outcome)
}

/// Segment posterior sums to one at every step of a long run.
pub fn posterior_normalization(cfg: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 1);
        let num_arms = 3;
        let spec = gen_geometric_uniform(0.001, num_arms, cfg.normalization_steps, &mut rng)?;
        let mut ptw = PtwState::new(cfg.normalization_depth, num_arms, 0.75)?;
        let mut worst = 0.0f64;
        let mut seg = 0usize;
        for t in 1..=cfg.normalization_steps {
            worst = worst.max((ptw.segment_posterior()?.total() - 1.0).abs());
            while spec.segments()[seg].segment.d < t {
                seg += 1;
            }
            let arm = rng.random_range(0..num_arms);
            let percept = rng.random::<f64>() < spec.segments()[seg].theta[arm];
            ptw.update(arm, percept)?;
        }
        Ok((
            worst <= 1e-9,
            format!(
                "{} steps at D={}, max |Σq - 1| = {worst:.2e}",
                cfg.normalization_steps, cfg.normalization_depth
            ),
        ))
    })();
    SuiteReport::finish("posterior normalization", start, outcome)
}

/// Active segments from the binary expansion against the definition (D ≤ 4)
/// and a tree walk (D ≤ 10).
pub fn active_segment_agreement() -> SuiteReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut checked = 0u64;
        for depth in 0..=10u32 {
            let enumeration = if depth <= 4 {
                Some(enumerate_partitions(depth, 0.5)?)
            } else {
                None
            };
            for t in 1..=1u64 << depth {
                let fast = active_segments(t, depth)?;
                if let Some(e) = &enumeration {
                    if fast != active_segments_by_definition(t, e) {
                        return Ok((false, format!("definition mismatch at t={t}, D={depth}")));
                    }
                }
                if fast != active_segments_recursive(t, depth) {
                    return Ok((false, format!("recursive mismatch at t={t}, D={depth}")));
                }
                checked += 1;
            }
        }
        let example = active_segments(3, 2)?;
        let expected = [(1, 4), (3, 4), (3, 3)];
        let got: Vec<(u64, u64)> = example.iter().map(|s| (s.c, s.d)).collect();
        Ok((
            got == expected,
            format!("{checked} (t, D) pairs; t=3, D=2 -> {got:?}"),
        ))
    })();
    SuiteReport::finish("active segments", start, outcome)
}

fn ml_bits(zeros: u64, ones: u64) -> f64 {
    let n = (zeros + ones) as f64;
    let term = |k: u64| {
        if k == 0 {
            0.0
        } else {
            k as f64 * (k as f64 / n).log2()
        }
    };
    term(zeros) + term(ones)
}

/// KT redundancy against the best fixed parameter in hindsight.
pub fn kt_redundancy_suite(cfg: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 2);
        let (mut violations, mut tightest) = (0usize, f64::INFINITY);
        for _ in 0..cfg.kt_sequences {
            let n = rng.random_range(1..=cfg.kt_max_len);
            let theta: f64 = if rng.random::<f64>() < 0.2 {
                [0.0, 1.0][rng.random_range(0..2)]
            } else {
                rng.random()
            };
            let mut kt = KtStats::default();
            let mut bits = 0.0;
            for _ in 0..n {
                let x = rng.random::<f64>() < theta;
                bits += kt.predict(x).bits();
                kt.update(x);
            }
            let redundancy = ml_bits(kt.zeros, kt.ones) - bits;
            let slack = kt_redundancy_bound(n)? - redundancy;
            tightest = tightest.min(slack);
            violations += usize::from(slack < 0.0);
        }
        Ok((
            violations == 0,
            format!(
                "{} sequences, {violations} violations, min slack {tightest:.3} bits",
                cfg.kt_sequences
            ),
        ))
    })();
    SuiteReport::finish("KT redundancy bound", start, outcome)
}

/// KTE redundancy on stationary bandit traces with random actions.
pub fn kte_redundancy_suite(cfg: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 3);
        let (mut violations, mut tightest) = (0usize, f64::INFINITY);
        for _ in 0..cfg.kte_traces {
            let num_arms = rng.random_range(1..=6usize);
            let n = rng.random_range(1..=cfg.kt_max_len);
            let theta: Vec<f64> = (0..num_arms).map(|_| rng.random()).collect();
            // Skewed action frequencies, so some arms may stay unused.
            let weights: Vec<f64> = (0..num_arms).map(|_| rng.random::<f64>().powi(3)).collect();
            let total: f64 = weights.iter().sum();
            let mut kte = KteState::new(num_arms);
            let mut bits = 0.0;
            for _ in 0..n {
                let mut u = rng.random::<f64>() * total;
                let mut arm = num_arms - 1;
                for (i, w) in weights.iter().enumerate() {
                    if u < *w {
                        arm = i;
                        break;
                    }
                    u -= w;
                }
                let x = rng.random::<f64>() < theta[arm];
                bits += kte.predict(arm, x)?.bits();
                kte.update(arm, x)?;
            }
            let ml: f64 = kte.arms().iter().map(|s| ml_bits(s.zeros, s.ones)).sum();
            let slack = kte_redundancy_bound(n, kte.used_arms() as u64)? - (ml - bits);
            tightest = tightest.min(slack);
            violations += usize::from(slack < 0.0);
        }
        Ok((
            violations == 0,
            format!(
                "{} traces, {violations} violations, min slack {tightest:.3} bits",
                cfg.kte_traces
            ),
        ))
    })();
    SuiteReport::finish("KTE redundancy bound", start, outcome)
}

/// PTW-KTE redundancy against the generating piecewise-stationary source,
/// checked at every prefix.
pub fn theorem1_suite(cfg: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 4);
        let (mut violations, mut tightest, mut checks) = (0usize, f64::INFINITY, 0u64);
        for _ in 0..cfg.theorem_specs {
            let depth = rng.random_range(1..=cfg.theorem_max_depth);
            let horizon = 1u64 << depth;
            let num_arms = rng.random_range(1..=4usize);
            let p = [0.5, 0.1, 0.02, 0.005][rng.random_range(0..4)];
            let spec = gen_geometric_uniform(p, num_arms, horizon, &mut rng)?;
            let mut ptw = PtwState::new(depth, num_arms, 0.5)?;
            let mut truth = 0.0;
            let mut seg = 0usize;
            for t in 1..=horizon {
                while spec.segments()[seg].segment.d < t {
                    seg += 1;
                }
                let arm = rng.random_range(0..num_arms);
                let theta = spec.segments()[seg].theta[arm];
                let x = rng.random::<f64>() < theta;
                truth += if x {
                    theta.log2()
                } else {
                    (1.0 - theta).log2()
                };
                ptw.update(arm, x)?;
                let bound = theorem1_bound(t, num_arms as u64, seg as u64 + 1)?;
                let slack = bound - (truth - ptw.log_marginal().bits());
                tightest = tightest.min(slack);
                violations += usize::from(slack < 0.0);
                checks += 1;
            }
        }
        Ok((
            violations == 0,
            format!("{} specs, {checks} prefixes, {violations} violations, min slack {tightest:.3} bits", cfg.theorem_specs),
        ))
    })();
    SuiteReport::finish("PTW redundancy bound", start, outcome)
}

/// Monte-Carlo tail of the KT posterior against the concentration bound.
pub fn concentration_suite(cfg: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 5);
        let eps_grid = [0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5];
        let (mut violations, mut cells, mut informative) = (0usize, 0usize, 0usize);
        let mut draws = vec![0.0f64; cfg.concentration_draws];
        for t in [4u64, 8, 16, 32, 64, 100, 150, 200] {
            let mut ss = vec![2, t / 4, t / 2, 3 * t / 4, t - 2];
            ss.retain(|&s| (2..=t - 2).contains(&s));
            ss.sort_unstable();
            ss.dedup();
            for s in ss {
                let beta = Beta::new(s as f64 + 0.5, (t - s) as f64 + 0.5)
                    .map_err(|e| crate::error::Error::Domain(e.to_string()))?;
                let mean = (s as f64 + 0.5) / (t as f64 + 1.0);
                for d in draws.iter_mut() {
                    *d = (beta.sample(&mut rng) - mean).abs();
                }
                for &eps in &eps_grid {
                    let tail =
                        draws.iter().filter(|&&d| d >= eps).count() as f64 / draws.len() as f64;
                    let bound = kt_concentration_bound(t, s, eps)?;
                    cells += 1;
                    informative += usize::from(bound < 1.0);
                    violations += usize::from(tail > bound);
                }
            }
        }
        Ok((
            violations == 0,
            format!("{cells} (t, s, ε) cells ({informative} with bound < 1), {violations} violations, {} draws each", cfg.concentration_draws),
        ))
    })();
    SuiteReport::finish("posterior concentration", start, outcome)
}

/// Forced exploration counts of MEUFE (and of the idealised Bernoulli
/// exploration process) against the exploration bound, at every grid point
/// where the bound is informative.
pub fn exploration_suite(cfg: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let outcome = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 6);
        let mut lines = Vec::new();
        let (mut points, mut vacuous, mut ok) = (0usize, 0usize, true);
        for depth in [10u32, 12, 14, 16] {
            let n = 1u64 << depth;
            for num_arms in [1usize, 2, 5] {
                for eps in [0.001, 0.002, 0.003, 0.005, (n as f64).powf(-0.6)] {
                    let bound = exploration_count_bound(n, num_arms as u64, eps)?;
                    if !bound.is_informative() {
                        vacuous += 1;
                        continue;
                    }
                    points += 1;
                    let (mut policy_fail, mut bernoulli_fail) = (0usize, 0usize);
                    let alpha = 1.0 / (n as f64).sqrt();
                    for _ in 0..cfg.exploration_episodes {
                        let theta: Vec<f64> = (0..num_arms).map(|_| rng.random()).collect();
                        let mut policy = ActivePtwPolicy::new(
                            num_arms,
                            depth,
                            ActivePtwPolicy::default_gamma(num_arms),
                            ReferencePolicy::Meufe,
                        )?;
                        let mut counts = vec![0i64; num_arms];
                        for _ in 0..n {
                            let arm = policy.select_action(&mut rng)?;
                            let x = rng.random::<f64>() < theta[arm];
                            policy.observe(arm, x)?;
                            if rng.random::<f64>() < alpha {
                                counts[rng.random_range(0..num_arms)] += 1;
                            }
                        }
                        let forced = policy.forced_explorations();
                        policy_fail +=
                            usize::from(forced.iter().any(|&c| (c as i64) < bound.min_count));
                        bernoulli_fail += usize::from(counts.iter().any(|&c| c < bound.min_count));
                    }
                    let episodes = cfg.exploration_episodes as f64;
                    let (pf, bf) = (
                        policy_fail as f64 / episodes,
                        bernoulli_fail as f64 / episodes,
                    );
                    // Allow three binomial standard errors on the empirical
                    // failure frequency.
                    let tol = 3.0
                        * (bound.failure_prob.min(1.0) * (1.0 - bound.failure_prob.min(1.0))
                            / episodes)
                            .sqrt();
                    let point_ok = pf <= bound.failure_prob + tol && bf <= bound.failure_prob + tol;
                    ok &= point_ok;
                    lines.push(format!(
                        "n=2^{depth} A={num_arms} ε={eps:.4}: min {} / δ {:.3}, failures MEUFE {pf:.3}, Bernoulli {bf:.3}",
                        bound.min_count, bound.failure_prob
                    ));
                }
            }
        }
        ok &= points > 0;
        Ok((
            ok,
            format!(
                "{points} informative points ({vacuous} vacuous skipped); {}",
                lines.join("; ")
            ),
        ))
    })();
    SuiteReport::finish("forced exploration", start, outcome)
}

/// The bound checks reported as one group.
pub fn bounds_suites(cfg: &SuiteConfig) -> Vec<SuiteReport> {
    vec![
        kt_redundancy_suite(cfg),
        kte_redundancy_suite(cfg),
        theorem1_suite(cfg),
    ]
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<SuiteReport> {
    let mut out = vec![
        oracle_equivalence(cfg),
        posterior_normalization(cfg),
        active_segment_agreement(),
    ];
    out.extend(bounds_suites(cfg));
    out.push(concentration_suite(cfg));
    out.push(exploration_suite(cfg));
    out
}
