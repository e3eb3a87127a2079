//! Benchmarks for the data-parallel kernels against their sequential
//! fallbacks: principal-minor enumeration of rational matrices and the
//! pointwise specialization checks of the counterexample family.
//!
//! Build with `--no-default-features` to measure the sequential code
//! path of `Mat::principal_minors` itself; with default features the
//! comparison below pits the rayon-backed enumeration against the
//! always-sequential variant in a single binary.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pmm::counterexamples::verify_family;
use pmm::exactfield::{FieldId, FieldValue};
use pmm::matrix::Mat;

fn random_rational_matrix(seed: u64, n: usize) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Mat::from_rows(
        FieldId::Q,
        (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        FieldValue::from_rational(
                            FieldId::Q,
                            rng.gen_range(-9..=9),
                            rng.gen_range(1..=4),
                        )
                    })
                    .collect()
            })
            .collect(),
    )
}

fn bench_principal_minors(c: &mut Criterion) {
    let mut group = c.benchmark_group("principal_minors");
    group.sample_size(10);
    for n in [8usize, 10, 12] {
        let m = random_rational_matrix(42, n);
        group.bench_with_input(BenchmarkId::new("parallel", n), &m, |b, m| {
            b.iter(|| m.principal_minors())
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &m, |b, m| {
            b.iter(|| m.principal_minors_seq())
        });
    }
    group.finish();
}

fn bench_family_verification(c: &mut Criterion) {
    let mut group = c.benchmark_group("counterexample_family");
    group.sample_size(10);
    for n in [2usize, 3] {
        group.bench_with_input(BenchmarkId::from_parameter(2 * n + 1), &n, |b, &n| {
            b.iter(|| verify_family(n).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_principal_minors, bench_family_verification);
criterion_main!(benches);
