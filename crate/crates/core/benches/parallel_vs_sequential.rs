//! Sequential vs rayon execution for the per-pair hot paths: the EM
//! E-step, corpus-wide Viterbi decoding and mean kappa. Build with
//! `--no-default-features` to measure the fallback alone.

use accent_rules::agreement::mean_kappa_with;
use accent_rules::align::{train_with, AlignmentConfig, EmTrainer};
use accent_rules::exec::Execution;
use accent_rules::generate::{generate, synthetic_base_lexicon, PlantedRule};
use accent_rules::lexicon::{pair_lexicons, PairedLexicon, PairingPolicy};
use accent_rules::mining::align_corpus;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn corpus(words: usize) -> PairedLexicon {
    let base = synthetic_base_lexicon(words, 1);
    let planted = [
        PlantedRule::new("t", "ʈ", 0.9).unwrap(),
        PlantedRule::new("θ", "t̪ʰ", 0.5).unwrap(),
        PlantedRule::new("z", "s", 0.6).unwrap(),
    ];
    let g = generate(&base, &planted, 2).unwrap();
    pair_lexicons(&base, &g.lexicon, PairingPolicy::Primary)
}

fn em_expectation(c: &mut Criterion) {
    let cfg = AlignmentConfig::default();
    let mut group = c.benchmark_group("em_expectation");
    for words in [500, 4000] {
        let paired = corpus(words);
        for (name, exec) in MODES {
            let trainer = EmTrainer::new(&paired, &cfg).unwrap().with_execution(exec);
            group.bench_with_input(BenchmarkId::new(name, words), &trainer, |b, t| {
                b.iter(|| t.expectation())
            });
        }
    }
    group.finish();
}

fn viterbi_corpus(c: &mut Criterion) {
    let cfg = AlignmentConfig::default();
    let paired = corpus(4000);
    let model = train_with(&paired, &cfg, Execution::default()).unwrap();
    let mut group = c.benchmark_group("viterbi_corpus");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, paired.len()), |b| {
            b.iter(|| align_corpus(&model, &paired, &cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn kappa(c: &mut Criterion) {
    let paired = corpus(4000);
    let rows: Vec<(String, Vec<String>, Vec<String>)> = paired
        .pairs
        .iter()
        .map(|p| {
            let labels = |v: &[accent_rules::Phone]| v.iter().map(|x| x.to_string()).collect();
            (p.word.clone(), labels(&p.source), labels(&p.target))
        })
        .collect();
    let mut group = c.benchmark_group("mean_kappa");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, rows.len()), |b| {
            b.iter(|| mean_kappa_with(&rows, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = em_expectation, viterbi_corpus, kappa
}
criterion_main!(benches);
