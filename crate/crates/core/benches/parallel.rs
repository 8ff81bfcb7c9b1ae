use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use shiftwalk::distribution::{evolve_exact_with, DistributionVector};
use shiftwalk::spectral::fourier_sum_with;
use shiftwalk::weight_stats::weight_histograms;
use shiftwalk::{BitVector, Chain, Execution};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn exact_evolution(c: &mut Criterion) {
    let n = 18;
    let chain = Chain::q1(n).unwrap();
    let d = DistributionVector::point_mass(&BitVector::zeros(n)).unwrap();
    let mut group = c.benchmark_group("evolve_exact_n18_4_steps");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| evolve_exact_with(&chain, &d, 4, exec).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo_histograms(c: &mut Criterion) {
    let n = 256;
    let chain = Chain::q1(n).unwrap();
    let x0 = BitVector::zeros(n);
    let mut group = c.benchmark_group("weight_histograms_n256_4096_paths");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| weight_histograms(&chain, &x0, &[128, 256], 4096, 1, exec).unwrap())
        });
    }
    group.finish();
}

fn weight_class_sum(c: &mut Criterion) {
    let mut group = c.benchmark_group("fourier_sum_n100000");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| fourier_sum_with(100_000, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    exact_evolution,
    monte_carlo_histograms,
    weight_class_sum
);
criterion_main!(benches);
