use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;
use ustep_bench::{cyclic_corpus, masked_config, warmed_miner};
use ustep_core::{sim_f, tokenize, Miner, Template, TemplateId, Token};

fn steady_state(c: &mut Criterion) {
    let corpus = cyclic_corpus(200, 20_000, 11);
    let mut group = c.benchmark_group("steady_state");
    group.throughput(Throughput::Elements(1));
    for phi in [2, 4, 8, 16] {
        let mut miner = warmed_miner(masked_config(0.5, phi), &corpus);
        let mut lines = corpus.iter().cycle();
        group.bench_with_input(BenchmarkId::new("process_message", phi), &phi, |b, _| {
            b.iter(|| black_box(miner.process_message(lines.next().unwrap())))
        });
    }
    group.finish();
}

fn cold_stream(c: &mut Criterion) {
    let mut group = c.benchmark_group("cold_stream");
    group.sample_size(20);
    group.throughput(Throughput::Elements(10_000));
    for templates in [20, 200] {
        let corpus = cyclic_corpus(templates, 10_000, 5);
        group.bench_with_input(BenchmarkId::new("10k_lines", templates), &corpus, |b, corpus| {
            b.iter(|| {
                let mut miner = Miner::new(masked_config(0.5, 8)).unwrap();
                for line in corpus {
                    black_box(miner.process_message(line));
                }
                miner.stats()
            })
        });
    }
    group.finish();
}

fn similarity(c: &mut Criterion) {
    let mut group = c.benchmark_group("sim_f");
    for len in [4, 16, 64] {
        let words: Vec<String> = (0..len).map(|i| format!("w{i}")).collect();
        let message = tokenize(&words.join(" ")).tokens;
        let mut template = Template::new(TemplateId(1), message.clone());
        let mut other = message.clone();
        other[len / 2] = Token::from_text("changed");
        template.absorb(&other);
        group.bench_with_input(BenchmarkId::from_parameter(len), &len, |b, _| {
            b.iter(|| sim_f(black_box(&message), black_box(&template.tokens), false))
        });
    }
    group.finish();
}

fn snapshots(c: &mut Criterion) {
    let corpus = cyclic_corpus(200, 20_000, 13);
    let miner = warmed_miner(masked_config(0.5, 8), &corpus);
    let bytes = miner.snapshot();
    let mut group = c.benchmark_group("snapshot");
    group.bench_function("write", |b| b.iter(|| black_box(miner.snapshot())));
    group.bench_function("restore", |b| {
        b.iter_batched(|| bytes.clone(), |bytes| Miner::restore(&bytes).unwrap(), BatchSize::SmallInput)
    });
    group.finish();
}

criterion_group!(benches, steady_state, cold_stream, similarity, snapshots);
criterion_main!(benches);
