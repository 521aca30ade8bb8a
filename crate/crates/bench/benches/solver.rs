use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use treewilf_bench::{single, tree, PATTERNS};
use treewilf_core::grammar::Grammar;
use treewilf_core::systems::{avoidance_system, compact_enumeration_system};
use treewilf_core::wilf::{classify, ClassifyOptions, Mode};
use treewilf_core::{av_series, elim, en_series, solve_truncated};

fn avoidance(c: &mut Criterion) {
    let mut g = c.benchmark_group("av_series");
    for word in PATTERNS {
        let t = tree(word);
        g.bench_with_input(BenchmarkId::new("K=257", word), &t, |b, t| b.iter(|| av_series(t, 257).unwrap()));
    }
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("en_series");
    g.sample_size(10);
    for word in PATTERNS {
        let t = tree(word);
        g.bench_with_input(BenchmarkId::new("K=129", word), &t, |b, t| b.iter(|| en_series(t, 129).unwrap()));
    }
    g.finish();
}

fn construction(c: &mut Criterion) {
    let mut g = c.benchmark_group("construction");
    for word in PATTERNS {
        let set = single(word);
        g.bench_with_input(BenchmarkId::new("avoidance_system", word), &set, |b, s| {
            b.iter(|| avoidance_system(s).unwrap())
        });
        let t = tree(word);
        g.bench_with_input(BenchmarkId::new("compact_enumeration_system", word), &t, |b, t| {
            b.iter(|| compact_enumeration_system(t).unwrap())
        });
    }
    let set = single("mmxxmxx");
    g.bench_function("grammar/mmxxmxx", |b| b.iter(|| Grammar::build(&set)));
    g.finish();
}

fn solver(c: &mut Criterion) {
    let sys = compact_enumeration_system(&tree("mmmxmmxmxxxxmxx")).unwrap();
    c.bench_function("solve_truncated/en 8 leaves K=65", |b| b.iter(|| solve_truncated(&sys, 65).unwrap()));
}

fn elimination(c: &mut Criterion) {
    let sys = avoidance_system(&single("mmxxmxx")).unwrap();
    c.bench_function("eliminate/mmxxmxx", |b| b.iter(|| elim::eliminate(&sys, &Default::default()).unwrap()));
    c.bench_function("certificate/K=100", |b| b.iter(|| elim::certificate::check(100).unwrap()));
}

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("classify");
    g.sample_size(10);
    let opts = ClassifyOptions::default();
    g.bench_function("n=6 av K=100", |b| b.iter(|| classify(6, 100, Mode::Avoidance, &opts).unwrap()));
    g.bench_function("n=6 en K=60", |b| b.iter(|| classify(6, 60, Mode::Enumeration, &opts).unwrap()));
    g.finish();
}

criterion_group!(benches, avoidance, enumeration, construction, solver, elimination, sweep);
criterion_main!(benches);
