use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nsbandit::harness::{
    emit_csv, emit_curves, format_sig, render_table, run_experiment, time_active_ptw_step,
    Execution, ExperimentConfig,
};
use nsbandit::verification::suites::{run_all, SuiteConfig};
use nsbandit::Error;

#[derive(Parser)]
#[command(
    name = "nsbandit",
    version,
    about = "Non-stationary Bernoulli bandit experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunOpts {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the number of episodes.
    #[arg(long)]
    episodes: Option<usize>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for episodes.
    #[arg(long, env = "NSBANDIT_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write summary.csv, curves.csv and config.json.
    Run {
        #[command(flatten)]
        opts: RunOpts,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the experiment at every switch probability of the grid and print
    /// an algorithms × p table.
    Table {
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run the verification suites.
    Verify {
        /// Small sizes, for a fast smoke check.
        #[arg(long)]
        quick: bool,
    },
    /// Time ActivePTW steps at several tree depths.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [16u32, 32])]
        depths: Vec<u32>,
        /// Steps per run, capped at the horizon 2^D of each depth.
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        #[arg(long, default_value_t = 5)]
        arms: usize,
        /// Repetitions per depth; the fastest is reported.
        #[arg(long, default_value_t = 5)]
        reps: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Config(_)) { 2 } else { 1 };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: String) -> Failure {
    Failure { code: 2, message }
}

fn load_config(opts: &RunOpts) -> Result<(ExperimentConfig, Execution), Failure> {
    let text = fs::read_to_string(&opts.config)
        .map_err(|e| usage(format!("cannot read {}: {e}", opts.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(n) = opts.episodes {
        cfg.episodes = n;
    }
    if let Some(s) = opts.seed {
        cfg.master_seed = s;
    }
    cfg.validate()?;
    let execution = match opts.threads {
        Some(0) => return Err(usage("--threads must be at least 1".into())),
        Some(k) => Execution::ParallelWith(k),
        None => Execution::Parallel,
    };
    Ok((cfg, execution))
}

fn write_outputs(
    dir: &Path,
    cfg: &ExperimentConfig,
    summary: &nsbandit::harness::ExperimentSummary,
) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(Error::from)?;
    emit_csv(summary, &dir.join("summary.csv"))?;
    emit_curves(summary, &dir.join("curves.csv"))?;
    let json = serde_json::to_string_pretty(cfg).map_err(Error::from)?;
    fs::write(dir.join("config.json"), json + "\n").map_err(Error::from)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { opts, out } => {
            let (cfg, execution) = load_config(&opts)?;
            let summary = run_experiment(&cfg, execution)?;
            write_outputs(&out, &cfg, &summary)?;
            for row in &summary.rows {
                println!(
                    "{:<24} {:>12} ± {}",
                    row.algorithm,
                    format_sig(row.mean_final_regret, 6),
                    format_sig(row.ci95, 3)
                );
            }
            println!("wrote {}", out.display());
        }
        Command::Table { opts } => {
            let (cfg, execution) = load_config(&opts)?;
            let columns = if cfg.regime.uses_switch_prob() {
                cfg.p_grid()
                    .into_iter()
                    .map(|p| {
                        let summary = run_experiment(&cfg.with_p(p), execution)?;
                        Ok((format!("p={}", format_sig(p, 6)), summary))
                    })
                    .collect::<Result<Vec<_>, Error>>()?
            } else {
                vec![(
                    format!("{:?}", cfg.regime),
                    run_experiment(&cfg, execution)?,
                )]
            };
            print!("{}", render_table(&columns));
        }
        Command::Verify { quick } => {
            let cfg = if quick {
                SuiteConfig::quick()
            } else {
                SuiteConfig::full()
            };
            let reports = run_all(&cfg);
            for r in &reports {
                println!("{}", r.line());
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(Failure {
                    code: 1,
                    message: format!("{failed} suite(s) failed"),
                });
            }
        }
        Command::Bench {
            depths,
            steps,
            arms,
            reps,
        } => {
            if depths.is_empty() || reps == 0 || steps == 0 {
                return Err(usage(
                    "bench needs at least one depth, step and repetition".into(),
                ));
            }
            let mut results = Vec::new();
            for &d in &depths {
                if d > 62 {
                    return Err(usage(format!("depth {d} exceeds 62")));
                }
                let n = steps.min(1u64 << d);
                let best = (0..reps)
                    .map(|r| time_active_ptw_step(d, arms, n, r as u64).map(|t| t.nanos_per_step()))
                    .collect::<Result<Vec<_>, Error>>()?
                    .into_iter()
                    .fold(f64::INFINITY, f64::min);
                println!("D={d:<3} T={n:<8} {best:>10.1} ns/step");
                results.push((d, best));
            }
            for w in results.windows(2) {
                println!("D={} -> D={}: x{:.2}", w[0].0, w[1].0, w[1].1 / w[0].1);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
