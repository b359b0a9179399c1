use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use nsbandit::policy::{ActivePtwPolicy, Policy, ReferencePolicy};
use nsbandit::ptw::PtwState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEPS: u64 = 4096;

fn ptw_update(c: &mut Criterion) {
    let mut group = c.benchmark_group("ptw_update");
    group.throughput(Throughput::Elements(STEPS));
    group.measurement_time(Duration::from_secs(3));
    for depth in [12u32, 16, 24, 32] {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let data: Vec<(usize, bool)> = (0..STEPS)
            .map(|_| (rng.random_range(0..5), rng.random::<f64>() < 0.4))
            .collect();
        group.bench_with_input(BenchmarkId::from_parameter(depth), &data, |b, data| {
            b.iter_batched_ref(
                || PtwState::new(depth, 5, 5.0 / 6.0).unwrap(),
                |ptw| {
                    for &(a, x) in data {
                        ptw.update(a, x).unwrap();
                    }
                    black_box(ptw.log_marginal())
                },
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn active_ptw_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("active_ptw_step");
    group.throughput(Throughput::Elements(STEPS));
    group.measurement_time(Duration::from_secs(3));
    for depth in [12u32, 16, 24, 32] {
        for mode in [ReferencePolicy::Meu, ReferencePolicy::Meufe] {
            let id = BenchmarkId::new(format!("{mode:?}"), depth);
            group.bench_function(id, |b| {
                b.iter_batched_ref(
                    || {
                        let p = ActivePtwPolicy::new(5, depth, 5.0 / 6.0, mode).unwrap();
                        (
                            p,
                            ChaCha8Rng::seed_from_u64(2),
                            ChaCha8Rng::seed_from_u64(3),
                        )
                    },
                    |(policy, rng, env)| {
                        for _ in 0..STEPS {
                            let a = policy.select_action(rng).unwrap();
                            policy
                                .observe(a, env.random::<f64>() < 0.1 * (a + 1) as f64)
                                .unwrap();
                        }
                    },
                    BatchSize::SmallInput,
                )
            });
        }
    }
    group.finish();
}

criterion_group!(benches, ptw_update, active_ptw_step);
criterion_main!(benches);
