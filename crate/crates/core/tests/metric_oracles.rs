mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tagparse::metrics::{
    attachment_score, bracketing_score, displacement_f1, extract_spans, relation_f1, AttachmentOptions, EvalParams,
    RelationMatch,
};
use tagparse::synth::{random_tree, TreeShape};
use tagparse::Execution;

const COLLINS_DELETED: [&str; 9] = ["TOP", "ROOT", "S1", "-NONE-", ",", ":", "``", "''", "."];
const COLLINS_EQUIVALENT: [(&str, &str); 1] = [("ADVP", "PRT")];

#[test]
fn bracketing_matches_brute_force_without_deletions() {
    let (gold, pred) = oracle_trees();
    let score = bracketing_score(&gold, &pred, &EvalParams::empty(), Execution::Sequential).unwrap();
    let brute = brute_bracket_counts(&gold, &pred, &[], &[]);
    assert_eq!(score.overall, brute);
    assert!((score.f1() - f1_from_counts(&brute)).abs() < 1e-9);
}

#[test]
fn bracketing_matches_brute_force_with_collins_setup() {
    let (gold, pred) = oracle_trees();
    let score = bracketing_score(&gold, &pred, &EvalParams::default(), Execution::Parallel).unwrap();
    let brute = brute_bracket_counts(&gold, &pred, &COLLINS_DELETED, &COLLINS_EQUIVALENT);
    assert_eq!(score.overall, brute);
    assert!((score.f1() - f1_from_counts(&brute)).abs() < 1e-9);
    // Hand count for the fixture, so that both routes are pinned.
    assert_eq!((brute.gold, brute.predicted, brute.matched), (46, 41, 35));
}

#[test]
fn attachment_matches_brute_force() {
    let (gold, pred) = oracle_dependencies();
    let score = attachment_score(&gold, &pred, &AttachmentOptions::default(), Execution::Parallel).unwrap();
    let brute = brute_attachment(&gold, &pred);
    assert_eq!(score.tokens, brute.tokens);
    assert_eq!(score.head_correct, brute.heads);
    assert_eq!(score.labeled_correct, brute.labeled);
    assert_eq!(score.uas(), 100.0 * brute.heads as f64 / brute.tokens as f64);
    assert_eq!(score.las(), 100.0 * brute.labeled as f64 / brute.tokens as f64);

    let by_disp = displacement_f1(&gold, &pred).unwrap();
    for (key, counts) in &brute.displacement {
        match key {
            None => assert_eq!(score.root, *counts),
            Some(d) => assert_eq!(by_disp[d], *counts, "displacement {}", d),
        }
    }
    assert_eq!(by_disp.len() + 1, brute.displacement.len());

    let by_rel = relation_f1(&gold, &pred, RelationMatch::HeadAndLabel).unwrap();
    assert_eq!(by_rel.len(), brute.relation.len());
    for (rel, counts) in &brute.relation {
        assert_eq!(by_rel[rel], *counts, "relation {}", rel);
        assert!((by_rel[rel].f1() - f1_from_counts(counts)).abs() < 1e-9);
    }
    assert_eq!(score.per_relation, by_rel);
}

#[test]
fn identity_scores_100() {
    let (gold, _) = oracle_trees();
    for params in [EvalParams::empty(), EvalParams::default()] {
        let s = bracketing_score(&gold, &gold, &params, Execution::Sequential).unwrap();
        assert_eq!(s.f1(), 100.0);
        assert_eq!(s.exact, gold.len());
        assert!(s
            .per_label
            .values()
            .chain(s.per_length.values())
            .all(|c| c.f1() == 100.0));
    }
    let (gold, _) = oracle_dependencies();
    let s = attachment_score(&gold, &gold, &AttachmentOptions::default(), Execution::Sequential).unwrap();
    assert_eq!((s.uas(), s.las()), (100.0, 100.0));
    assert!(s.per_displacement.values().all(|c| c.f1() == 100.0));
    assert!(relation_f1(&gold, &gold, RelationMatch::LabelOnly)
        .unwrap()
        .values()
        .all(|c| c.f1() == 100.0));
}

#[test]
fn skipping_punctuation_drops_those_tokens() {
    let (gold, pred) = oracle_dependencies();
    let opts = AttachmentOptions { skip_punct: true };
    let s = attachment_score(&gold, &pred, &opts, Execution::Sequential).unwrap();
    let punct = gold.iter().flat_map(|g| &g.deprels).filter(|r| *r == "punct").count() as u64;
    assert_eq!(s.tokens, brute_attachment(&gold, &pred).tokens - punct);
}

#[test]
fn breakdowns_reconcile_with_totals() {
    let (gold, pred) = oracle_trees();
    let s = bracketing_score(&gold, &pred, &EvalParams::default(), Execution::Sequential).unwrap();
    let mut sum = s.whole_sentence;
    for c in s.per_length.values() {
        sum += *c;
    }
    assert_eq!(sum, s.overall);
}

proptest! {
    #[test]
    fn spans_agree_with_brute_force_on_random_trees(seed in any::<u64>()) {
        let tree = random_tree(&mut ChaCha8Rng::seed_from_u64(seed), &TreeShape::default());
        let (spans, _) = extract_spans(&tree, &EvalParams::empty());
        let mut ours: Vec<(String, usize, usize)> = spans.into_iter().map(|s| (s.label, s.start, s.end)).collect();
        let mut brute = brute_brackets(&tree, &[], &[]);
        ours.sort();
        brute.sort();
        prop_assert_eq!(ours, brute);
    }

    #[test]
    fn sequential_and_parallel_scores_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = TreeShape { max_words: 8, ..TreeShape::default() };
        let gold: Vec<_> = (0..6).map(|_| random_tree(&mut rng, &shape)).collect();
        // Predicted trees over the same words: regenerate until lengths match.
        let pred: Vec<_> = gold
            .iter()
            .map(|g| loop {
                let t = random_tree(&mut rng, &shape);
                if t.len() == g.len() {
                    break t;
                }
            })
            .collect();
        let a = bracketing_score(&gold, &pred, &EvalParams::empty(), Execution::Sequential).unwrap();
        let b = bracketing_score(&gold, &pred, &EvalParams::empty(), Execution::Parallel).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.overall, brute_bracket_counts(&gold, &pred, &[], &[]));
    }
}
