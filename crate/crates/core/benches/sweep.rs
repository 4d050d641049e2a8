use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracmat_core::sweep::{run_sweep_sequential, SweepConfig};

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for count in [50, 200] {
        let config = SweepConfig {
            seed: 1,
            count,
            ..SweepConfig::default()
        };
        group.bench_with_input(
            BenchmarkId::new("sequential", count),
            &config,
            |b, config| b.iter(|| black_box(run_sweep_sequential(config)).passed),
        );
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", count), &config, |b, config| {
            b.iter(|| black_box(fracmat_core::sweep::run_sweep_parallel(config)).passed)
        });
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
