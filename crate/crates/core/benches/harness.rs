//! Parallel vs sequential execution of the sample harnesses.
//!
//! `cargo bench -p gd-core --bench harness`. Without the `parallel` feature
//! both variants run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use gd_core::garding::is_hyperbolic;
use gd_core::majorize::{majorization_harness, GammaMode};
use gd_core::operators::{OperatorSpec, Space};
use gd_core::parallel::Exec;
use gd_core::sampling::ScaleRange;

const MODES: [(&str, Exec); 2] = [
    ("parallel", Exec::Parallel),
    ("sequential", Exec::Sequential),
];

fn operators() -> Vec<(&'static str, OperatorSpec)> {
    vec![
        ("sigma3_R5", OperatorSpec::sigma(Space::real(5), 3).unwrap()),
        (
            "pfold2_C3",
            OperatorSpec::pfold(Space::complex(3), 2).unwrap(),
        ),
        ("det_H2", OperatorSpec::det(Space::quaternionic(2)).unwrap()),
    ]
}

fn majorization(c: &mut Criterion) {
    let mut group = c.benchmark_group("majorization_harness");
    group.sample_size(20);
    for (name, f) in operators() {
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(mode, name), &f, |b, f| {
                b.iter(|| {
                    majorization_harness(
                        f,
                        500,
                        7,
                        ScaleRange::default(),
                        GammaMode::FromIdentity,
                        exec,
                    )
                    .map(|r| black_box(r.min_gap))
                })
            });
        }
    }
    group.finish();
}

fn hyperbolicity(c: &mut Criterion) {
    let mut group = c.benchmark_group("is_hyperbolic");
    group.sample_size(20);
    for (name, f) in operators() {
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(mode, name), &f, |b, f| {
                b.iter(|| black_box(is_hyperbolic(f, 500, 7, 1e-8, exec).worst_gap))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, majorization, hyperbolicity);
criterion_main!(benches);
