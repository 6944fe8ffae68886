use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ncs_core::sat::encode;
use ncs_core::solver::solve;
use ncs_core::synth::{generate, GenConfig};

fn encode_and_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("encode_solve");
    group.sample_size(10);
    for (n, m) in [(4, 32), (4, 128), (6, 64), (8, 64)] {
        let (_, data) = generate(&GenConfig::new(n, 3, m, 1).unwrap()).unwrap();
        let id = format!("n{n}_m{m}");
        group.bench_with_input(BenchmarkId::new("encode", &id), &data, |b, d| b.iter(|| encode(black_box(d)).unwrap()));
        let cnf = encode(&data).unwrap().cnf;
        group.bench_with_input(BenchmarkId::new("solve", &id), &cnf, |b, f| {
            b.iter(|| assert!(solve(black_box(f)).unwrap().is_sat()))
        });
    }
    group.finish();
}

criterion_group!(benches, encode_and_solve);
criterion_main!(benches);
