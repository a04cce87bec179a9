//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tagparse::dep_codec::encode_dep;
use tagparse::io::{read_bracketed, read_conllu, LabeledSentence, PosColumn};
use tagparse::metrics::Counts;
use tagparse::synth::random_dependency_sentence;
use tagparse::tagger::{LinearProbe, Mode};
use tagparse::{DependencySentence, Execution, Tree};

pub const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/{}", FIXTURES, name)).unwrap()
}

pub fn oracle_trees() -> (Vec<Tree>, Vec<Tree>) {
    (
        read_bracketed(&fixture("oracle_gold.ptb")).unwrap(),
        read_bracketed(&fixture("oracle_pred.ptb")).unwrap(),
    )
}

pub fn oracle_dependencies() -> (Vec<DependencySentence>, Vec<DependencySentence>) {
    (
        read_conllu(&fixture("oracle_gold.conllu"), PosColumn::Upos).unwrap(),
        read_conllu(&fixture("oracle_pred.conllu"), PosColumn::Upos).unwrap(),
    )
}

// ---------------------------------------------------------------------------
// Counting oracles. Deliberately naive: lists instead of maps, quadratic
// matching, no shared code with the library.

/// Size of the multiset intersection, by greedy removal.
pub fn multiset_matches<T: PartialEq + Clone>(gold: &[T], pred: &[T]) -> u64 {
    let mut pool: Vec<Option<T>> = pred.iter().cloned().map(Some).collect();
    let mut matched = 0;
    for g in gold {
        if let Some(slot) = pool.iter_mut().find(|p| p.as_ref() == Some(g)) {
            *slot = None;
            matched += 1;
        }
    }
    matched
}

/// `(label, first, last)` brackets over retained word positions, walking
/// the raw tree: every node of a unary chain and every `+`-joined element
/// is its own bracket.
pub fn brute_brackets(tree: &Tree, deleted: &[&str], equivalent: &[(&str, &str)]) -> Vec<(String, usize, usize)> {
    fn covered(
        tree: &Tree,
        deleted: &[&str],
        next: &mut usize,
        out: &mut Vec<Vec<usize>>,
        labels: &mut Vec<String>,
    ) -> Vec<usize> {
        match tree {
            Tree::Leaf { pos, .. } => {
                if deleted.contains(&pos.as_str()) {
                    vec![]
                } else {
                    *next += 1;
                    vec![*next]
                }
            }
            Tree::Node { label, children } => {
                let mut mine = Vec::new();
                for c in children {
                    mine.extend(covered(c, deleted, next, out, labels));
                }
                out.push(mine.clone());
                labels.push(label.clone());
                mine
            }
        }
    }
    let mut positions = Vec::new();
    let mut labels = Vec::new();
    covered(tree, deleted, &mut 0, &mut positions, &mut labels);
    let mut brackets = Vec::new();
    for (words, label) in positions.iter().zip(&labels) {
        if words.is_empty() {
            continue;
        }
        let (lo, hi) = (*words.iter().min().unwrap(), *words.iter().max().unwrap());
        for part in label.split('+') {
            if part.is_empty() || deleted.contains(&part) {
                continue;
            }
            let canon = equivalent
                .iter()
                .find(|(_, other)| *other == part)
                .map(|(c, _)| *c)
                .unwrap_or(part);
            brackets.push((canon.to_owned(), lo, hi));
        }
    }
    brackets
}

pub fn brute_bracket_counts(gold: &[Tree], pred: &[Tree], deleted: &[&str], equivalent: &[(&str, &str)]) -> Counts {
    let mut total = Counts::default();
    for (g, p) in gold.iter().zip(pred) {
        let gb = brute_brackets(g, deleted, equivalent);
        let pb = brute_brackets(p, deleted, equivalent);
        total.gold += gb.len() as u64;
        total.predicted += pb.len() as u64;
        total.matched += multiset_matches(&gb, &pb);
    }
    total
}

/// F1 in percent straight from counts: `200 m / (g + p)`.
pub fn f1_from_counts(c: &Counts) -> f64 {
    if c.gold + c.predicted == 0 {
        100.0
    } else {
        200.0 * c.matched as f64 / (c.gold + c.predicted) as f64
    }
}

pub struct BruteAttachment {
    pub tokens: u64,
    pub heads: u64,
    pub labeled: u64,
    /// `None` is the root bucket.
    pub displacement: BTreeMap<Option<i64>, Counts>,
    pub relation: BTreeMap<String, Counts>,
}

pub fn brute_attachment(gold: &[DependencySentence], pred: &[DependencySentence]) -> BruteAttachment {
    let mut out = BruteAttachment {
        tokens: 0,
        heads: 0,
        labeled: 0,
        displacement: BTreeMap::new(),
        relation: BTreeMap::new(),
    };
    let disp = |h: usize, d: usize| if h == 0 { None } else { Some(h as i64 - d as i64) };
    for (g, p) in gold.iter().zip(pred) {
        for d in 1..=g.heads.len() {
            let (gh, ph) = (g.heads[d - 1], p.heads[d - 1]);
            let (gr, pr) = (&g.deprels[d - 1], &p.deprels[d - 1]);
            out.tokens += 1;
            let head_ok = gh == ph;
            let both = head_ok && gr == pr;
            out.heads += head_ok as u64;
            out.labeled += both as u64;
            out.displacement.entry(disp(gh, d)).or_default().gold += 1;
            out.displacement.entry(disp(ph, d)).or_default().predicted += 1;
            out.relation.entry(gr.clone()).or_default().gold += 1;
            out.relation.entry(pr.clone()).or_default().predicted += 1;
            if both {
                out.displacement.entry(disp(gh, d)).or_default().matched += 1;
                out.relation.entry(gr.clone()).or_default().matched += 1;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Extended-precision evaluation of softmax(Wx + b) with double-double dot
// products, and a probability formula that never normalizes by a sum of
// large terms: p_k = 1 / sum_j exp(z_j - z_k).

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn dd_add(hi: f64, lo: f64, x: f64, xlo: f64) -> (f64, f64) {
    let (s, e) = two_sum(hi, x);
    let e = e + lo + xlo;
    two_sum(s, e)
}

/// Double-double `w . x + b`.
pub fn dd_affine(w: &[f64], x: &[f64], b: f64) -> (f64, f64) {
    let mut acc = (b, 0.0);
    for (wi, xi) in w.iter().zip(x) {
        let p = wi * xi;
        let e = wi.mul_add(*xi, -p);
        acc = dd_add(acc.0, acc.1, p, e);
    }
    acc
}

pub fn oracle_forward(weights: &[f64], bias: &[f64], x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let z: Vec<(f64, f64)> = bias
        .iter()
        .enumerate()
        .map(|(k, &b)| dd_affine(&weights[k * d..(k + 1) * d], x, b))
        .collect();
    (0..z.len())
        .map(|k| {
            let total: f64 = z
                .iter()
                .map(|zj| {
                    let (hi, lo) = dd_add(zj.0, zj.1, -z[k].0, -z[k].1);
                    (hi + lo).exp()
                })
                .sum();
            1.0 / total
        })
        .collect()
}

/// Summed negative log-likelihood, written independently of the library.
pub fn oracle_loss(weights: &[f64], bias: &[f64], batch: &[(Vec<f64>, usize)]) -> f64 {
    batch
        .iter()
        .map(|(x, y)| {
            let d = x.len();
            let z: Vec<f64> = bias
                .iter()
                .enumerate()
                .map(|(k, &b)| {
                    let (hi, lo) = dd_affine(&weights[k * d..(k + 1) * d], x, b);
                    hi + lo
                })
                .collect();
            let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln() - z[*y]
        })
        .sum()
}

/// Relative error with a floor on the denominator so that components that
/// are zero up to rounding do not dominate.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

pub fn random_probe<R: Rng>(rng: &mut R, classes: usize, dim: usize, scale: f64) -> LinearProbe {
    LinearProbe::from_parts(
        classes,
        dim,
        (0..classes * dim).map(|_| rng.gen_range(-scale..scale)).collect(),
        (0..classes).map(|_| rng.gen_range(-scale..scale)).collect(),
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Synthetic labeled corpora.

/// Random dependency trees turned into label files. Word forms are drawn
/// from a small vocabulary tied to the tag so that vectors carry signal.
pub fn synthetic_dep_corpus<R: Rng>(rng: &mut R, sentences: usize, max_tokens: usize) -> Vec<LabeledSentence> {
    (0..sentences)
        .map(|_| {
            let s = random_dependency_sentence(rng, max_tokens);
            let labels = encode_dep(&s).unwrap().iter().map(ToString::to_string).collect();
            let forms = s
                .tokens
                .iter()
                .map(|t| format!("{}{}", t.pos.to_lowercase(), rng.gen_range(0..3)))
                .collect();
            LabeledSentence { forms, labels }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Finite-difference gradient check.

const H: f64 = 1e-5;

/// Checks W, b and shared embedding rows of one random instance against
/// central differences of an independently written loss. Returns the worst
/// relative error seen.
pub fn gradient_check_instance(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(2..=15);
    let d = rng.gen_range(1..=20);
    let probe = random_probe(&mut rng, k, d, 1.0);
    let rows = rng.gen_range(1..=4);
    let table: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let items: Vec<(usize, usize)> = (0..rng.gen_range(1..=8))
        .map(|_| (rng.gen_range(0..rows), rng.gen_range(0..k)))
        .collect();
    let batch_of =
        |table: &[Vec<f64>]| -> Vec<(Vec<f64>, usize)> { items.iter().map(|&(r, y)| (table[r].clone(), y)).collect() };

    let owned = batch_of(&table);
    let batch: Vec<(&[f64], usize)> = owned.iter().map(|(x, y)| (x.as_slice(), *y)).collect();
    let g = probe
        .loss_and_gradients(&batch, Mode::FineTune, Execution::Parallel)
        .unwrap();
    assert!((g.loss - oracle_loss(probe.weights(), probe.bias(), &owned)).abs() < 1e-9);

    let mut worst: f64 = 0.0;
    let mut w = probe.weights().to_vec();
    for i in 0..w.len() {
        let orig = w[i];
        w[i] = orig + H;
        let up = oracle_loss(&w, probe.bias(), &owned);
        w[i] = orig - H;
        let down = oracle_loss(&w, probe.bias(), &owned);
        w[i] = orig;
        worst = worst.max(relative_error(g.weights[i], (up - down) / (2.0 * H)));
    }
    let mut b = probe.bias().to_vec();
    for i in 0..b.len() {
        let orig = b[i];
        b[i] = orig + H;
        let up = oracle_loss(probe.weights(), &b, &owned);
        b[i] = orig - H;
        let down = oracle_loss(probe.weights(), &b, &owned);
        b[i] = orig;
        worst = worst.max(relative_error(g.bias[i], (up - down) / (2.0 * H)));
    }
    // An embedding row's gradient is the sum over the items that use it.
    let inputs = g.inputs.expect("fine-tune mode returns input gradients");
    let mut perturbed = table.clone();
    for r in 0..rows {
        for j in 0..d {
            let analytic: f64 = items
                .iter()
                .zip(&inputs)
                .filter(|((row, _), _)| *row == r)
                .map(|(_, gi)| gi[j])
                .sum();
            let orig = table[r][j];
            perturbed[r][j] = orig + H;
            let up = oracle_loss(probe.weights(), probe.bias(), &batch_of(&perturbed));
            perturbed[r][j] = orig - H;
            let down = oracle_loss(probe.weights(), probe.bias(), &batch_of(&perturbed));
            perturbed[r][j] = orig;
            worst = worst.max(relative_error(analytic, (up - down) / (2.0 * H)));
        }
    }
    worst
}
