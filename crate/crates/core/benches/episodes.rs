//! Whole experiments under serial and parallel episode execution. Build with
//! `--no-default-features` to see the sequential fallback for the parallel
//! variants.

use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nsbandit::harness::{run_experiment, Execution, ExperimentConfig};

fn config(episodes: usize) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{"regime":"geometric_uniform","p":0.001,"num_arms":5,"horizon":10000,
            "episodes":{episodes},"master_seed":3,
            "algorithms":[{{"type":"active_ptw"}},{{"type":"thompson"}},{{"type":"sw_ucb"}}]}}"#
    ))
    .expect("valid config")
}

fn episodes(c: &mut Criterion) {
    let mut group = c.benchmark_group("experiment");
    group.sample_size(10);
    group.measurement_time(Duration::from_secs(10));
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    for n in [8usize, 32] {
        let cfg = config(n);
        group.bench_with_input(BenchmarkId::new("serial", n), &cfg, |b, cfg| {
            b.iter(|| run_experiment(cfg, Execution::Serial).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &cfg, |b, cfg| {
            b.iter(|| run_experiment(cfg, Execution::Parallel).unwrap())
        });
        group.bench_with_input(
            BenchmarkId::new(format!("parallel_{threads}t"), n),
            &cfg,
            |b, cfg| b.iter(|| run_experiment(cfg, Execution::ParallelWith(threads)).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, episodes);
criterion_main!(benches);
