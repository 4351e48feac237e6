use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;
use uqscore_bench::samples;
use uqscore_core::{decompose, generic_triple, ScoringRule};

fn decomposition(c: &mut Criterion) {
    let mut group = c.benchmark_group("decompose");
    for (k, m) in [(2, 10), (10, 50)] {
        let batch = samples(256, k, m, 1);
        group.throughput(Throughput::Elements(batch.len() as u64));
        for rule in ScoringRule::ALL {
            group.bench_with_input(
                BenchmarkId::new(rule.name(), format!("K{k}_M{m}")),
                &batch,
                |b, batch| {
                    b.iter(|| {
                        batch
                            .iter()
                            .map(|s| decompose(rule, black_box(s)).total)
                            .sum::<f64>()
                    })
                },
            );
        }
    }
    group.finish();

    let batch = samples(256, 10, 50, 2);
    c.bench_function("generic_triple/log/K10_M50", |b| {
        b.iter(|| {
            batch
                .iter()
                .map(|s| generic_triple(ScoringRule::Log, black_box(s)).total)
                .sum::<f64>()
        })
    });
}

criterion_group!(benches, decomposition);
criterion_main!(benches);
