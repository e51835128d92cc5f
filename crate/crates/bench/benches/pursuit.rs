use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use greedy_cs::pursuit::{womp, PursuitConfig, SelectionPolicy};
use greedy_cs_bench::{gaussian, observation};

fn policies(c: &mut Criterion) {
    let dict = gaussian(64, 128);
    let obs = observation(&dict, 8);
    let mut group = c.benchmark_group("womp/64x128/k8");
    for policy in SelectionPolicy::ALL {
        let config = PursuitConfig::new(0.7, 1e-9).unwrap().with_policy(policy);
        group.bench_with_input(
            BenchmarkId::from_parameter(policy.short_name()),
            &config,
            |b, config| b.iter(|| womp(&dict, &obs, config).unwrap()),
        );
    }
    group.finish();
}

fn sparsity(c: &mut Criterion) {
    let dict = gaussian(128, 256);
    let config = PursuitConfig::omp(1e-9).unwrap();
    let mut group = c.benchmark_group("omp/128x256");
    for k in [4, 16, 32] {
        let obs = observation(&dict, k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &obs, |b, obs| {
            b.iter(|| womp(&dict, obs, &config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, policies, sparsity);
criterion_main!(benches);
