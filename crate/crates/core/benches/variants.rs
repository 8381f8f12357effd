use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use paraknap::fptas::{fptas_with, Variant};
use paraknap::generate::{generate, GenParams};
use paraknap::{ExecMode, Rational};

fn variants(c: &mut Criterion) {
    let eps = Rational::new(1, 4);
    let mut group = c.benchmark_group("fptas");
    group.sample_size(10);
    for n in [8, 16] {
        let inst = generate(&GenParams::small(n, 1)).unwrap();
        for (vname, variant) in [("explicit", Variant::Explicit), ("implicit", Variant::Implicit)] {
            for (mname, mode) in [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)] {
                group.bench_with_input(BenchmarkId::new(format!("{vname}/{mname}"), n), &inst, |b, inst| {
                    b.iter(|| fptas_with(inst, &eps, variant, mode).unwrap())
                });
            }
        }
    }
    group.finish();
}

criterion_group!(benches, variants);
criterion_main!(benches);
