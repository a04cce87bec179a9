//! Sequential vs. parallel execution of the data-parallel stages.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use tagparse::const_codec::{decode_const, encode_const};
use tagparse::metrics::{attachment_score, bracketing_score, AttachmentOptions, EvalParams};
use tagparse::synth::{random_dependency_sentence, random_tree, TreeShape};
use tagparse::tagger::{LinearProbe, Mode};
use tagparse::{DependencySentence, Execution, Tree};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn trees(n: usize, seed: u64) -> Vec<Tree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_tree(&mut rng, &TreeShape::default())).collect()
}

fn same_length_trees(gold: &[Tree], seed: u64) -> Vec<Tree> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gold.iter()
        .map(|g| loop {
            let t = random_tree(&mut rng, &TreeShape::default());
            if t.len() == g.len() {
                break t;
            }
        })
        .collect()
}

fn dependencies(n: usize, seed: u64) -> Vec<DependencySentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_dependency_sentence(&mut rng, 30)).collect()
}

fn codec(c: &mut Criterion) {
    let corpus = trees(5_000, 1);
    let mut group = c.benchmark_group("const_round_trip");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                exec.map(&corpus, |t| {
                    let labels = encode_const(t).unwrap();
                    decode_const(&labels, &t.words(), &t.tags()).unwrap()
                })
            })
        });
    }
    group.finish();
}

fn evaluation(c: &mut Criterion) {
    let gold = trees(5_000, 2);
    let pred = same_length_trees(&gold, 3);
    let mut group = c.benchmark_group("bracketing");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| bracketing_score(black_box(&gold), black_box(&pred), &EvalParams::default(), exec).unwrap())
        });
    }
    group.finish();

    let gold = dependencies(5_000, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pred: Vec<DependencySentence> = gold
        .iter()
        .map(|g| {
            let mut p = g.clone();
            let n = p.heads.len();
            // Perturb about one head in five; validity does not matter for scoring.
            for h in p.heads.iter_mut() {
                if rng.gen_bool(0.2) {
                    *h = rng.gen_range(0..=n);
                }
            }
            p
        })
        .collect();
    let mut group = c.benchmark_group("attachment");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| attachment_score(&gold, &pred, &AttachmentOptions::default(), exec).unwrap())
        });
    }
    group.finish();
}

fn gradients(c: &mut Criterion) {
    let (classes, dim, items) = (200, 300, 2_048);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let probe = LinearProbe::from_parts(
        classes,
        dim,
        (0..classes * dim).map(|_| rng.gen_range(-0.1..0.1)).collect(),
        vec![0.0; classes],
    )
    .unwrap();
    let inputs: Vec<Vec<f64>> = (0..items)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let batch: Vec<(&[f64], usize)> = inputs
        .iter()
        .map(|x| (x.as_slice(), rng.gen_range(0..classes)))
        .collect();
    let mut group = c.benchmark_group("loss_and_gradients");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| probe.loss_and_gradients(&batch, Mode::FineTune, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, codec, evaluation, gradients);
criterion_main!(benches);
