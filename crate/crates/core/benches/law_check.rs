use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bvalid::laws::{bundled_corpus, check_corpus, CheckOptions};
use bvalid::value::Scope;
use bvalid::Parallelism;

fn corpus(c: &mut Criterion) {
    let laws = bundled_corpus();
    let scope = Scope::default();
    let opts = CheckOptions::default();
    let mut group = c.benchmark_group("check_corpus");
    group.sample_size(20);
    for (name, p) in [("sequential", Parallelism::Sequential), ("parallel", Parallelism::Threads(0))] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &p, |b, &p| {
            b.iter(|| check_corpus(&laws, &scope, p, &opts))
        });
    }
    group.finish();
}

criterion_group!(benches, corpus);
criterion_main!(benches);
