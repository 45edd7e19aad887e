use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use twsat::bench::{bench_widths, BenchOptions, BenchTranslation};
use twsat::gen::{gen_corpus, random_hcf_program, ProgramShape, Scenario};
use twsat::oracles::answer_sets_proving_with;
use twsat::par::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn proving_oracle(c: &mut Criterion) {
    let p = random_hcf_program(11, ProgramShape::small(14, 18));
    let mut g = c.benchmark_group("proving_oracle");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| answer_sets_proving_with(black_box(&p), 16, exec).unwrap())
        });
    }
    g.finish();
}

fn width_sweep(c: &mut Criterion) {
    let corpus = gen_corpus(Scenario::S1, 1, 8);
    let translations = BenchTranslation::for_scenario(Scenario::S1);
    let mut g = c.benchmark_group("width_sweep");
    g.sample_size(10);
    for (name, exec) in MODES {
        let opts = BenchOptions { timing: false, exec, ..Default::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| bench_widths(Scenario::S1, black_box(&corpus), &translations, opts))
        });
    }
    g.finish();
}

criterion_group!(benches, proving_oracle, width_sweep);
criterion_main!(benches);
