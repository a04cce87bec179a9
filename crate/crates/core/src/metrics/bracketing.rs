use std::collections::{BTreeMap, HashMap};

use super::{merge_maps, Counts, EvalParams, LengthBucket, MetricsError};
use crate::const_codec::collapse_unaries;
use crate::parallel::Execution;
use crate::tree::{Tree, UNARY_SEPARATOR};

/// A scored bracket over retained words `start..=end` (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledSpan {
    pub label: String,
    pub start: usize,
    pub end: usize,
    /// Top surviving element of its unary chain.
    pub uppermost: bool,
}

impl LabeledSpan {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn key(&self) -> (&str, usize, usize) {
        (&self.label, self.start, self.end)
    }
}

/// Brackets of `tree` after label deletion and equivalence.
///
/// Unary chains, collapsed (`X+Y`) or not, contribute one bracket per
/// element. Preterminals are not brackets. Returns the spans and the number
/// of retained words.
pub fn extract_spans(tree: &Tree, params: &EvalParams) -> (Vec<LabeledSpan>, usize) {
    let collapsed = collapse_unaries(tree);
    let mut spans = Vec::new();
    let mut next = 0;
    walk(&collapsed, params, &mut next, &mut spans);
    (spans, next)
}

/// Returns the retained-word range covered by `tree`, if any.
fn walk(tree: &Tree, params: &EvalParams, next: &mut usize, out: &mut Vec<LabeledSpan>) -> Option<(usize, usize)> {
    match tree {
        Tree::Leaf { pos, .. } => {
            if params.is_deleted(pos) {
                None
            } else {
                *next += 1;
                Some((*next, *next))
            }
        }
        Tree::Node { label, children } => {
            let mut range: Option<(usize, usize)> = None;
            for child in children {
                if let Some((s, e)) = walk(child, params, next, out) {
                    range = Some(match range {
                        None => (s, e),
                        Some((s0, _)) => (s0, e),
                    });
                }
            }
            let (start, end) = range?;
            let mut uppermost = true;
            for element in label.split(UNARY_SEPARATOR) {
                if element.is_empty() || params.is_deleted(element) {
                    continue;
                }
                out.push(LabeledSpan {
                    label: params.canonical(element).to_owned(),
                    start,
                    end,
                    uppermost,
                });
                uppermost = false;
            }
            range
        }
    }
}

/// Micro-averaged bracketing scores with breakdowns by span length and
/// label. Whole-sentence spans are left out of both breakdowns.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BracketScore {
    pub overall: Counts,
    pub per_length: BTreeMap<LengthBucket, Counts>,
    pub per_label: BTreeMap<String, Counts>,
    /// Spans covering the whole sentence, so that `per_length` plus this
    /// adds up to `overall`.
    pub whole_sentence: Counts,
    pub sentences: usize,
    /// Sentences whose bracket sets match exactly.
    pub exact: usize,
}

impl BracketScore {
    pub fn precision(&self) -> f64 {
        self.overall.precision()
    }

    pub fn recall(&self) -> f64 {
        self.overall.recall()
    }

    pub fn f1(&self) -> f64 {
        self.overall.f1()
    }

    fn merge(&mut self, other: &BracketScore) {
        self.overall += other.overall;
        merge_maps(&mut self.per_length, &other.per_length);
        merge_maps(&mut self.per_label, &other.per_label);
        self.whole_sentence += other.whole_sentence;
        self.sentences += other.sentences;
        self.exact += other.exact;
    }
}

fn multiset<'a>(spans: impl Iterator<Item = &'a LabeledSpan>) -> HashMap<(&'a str, usize, usize), u64> {
    let mut m = HashMap::new();
    for s in spans {
        *m.entry(s.key()).or_insert(0) += 1;
    }
    m
}

fn sentence_score(gold: &Tree, pred: &Tree, params: &EvalParams, index: usize) -> Result<BracketScore, MetricsError> {
    let (gold_spans, gold_words) = extract_spans(gold, params);
    let (pred_spans, pred_words) = extract_spans(pred, params);
    if gold_words != pred_words || gold.len() != pred.len() {
        return Err(MetricsError::SentenceLength {
            sentence: index,
            gold: gold.len(),
            predicted: pred.len(),
        });
    }

    let mut score = BracketScore {
        sentences: 1,
        ..Default::default()
    };
    let g = multiset(gold_spans.iter());
    let p = multiset(pred_spans.iter());
    let matched: u64 = g.iter().map(|(k, &c)| c.min(p.get(k).copied().unwrap_or(0))).sum();
    score.overall = Counts {
        gold: gold_spans.len() as u64,
        predicted: pred_spans.len() as u64,
        matched,
    };
    if matched as usize == gold_spans.len() && matched as usize == pred_spans.len() {
        score.exact = 1;
    }

    let whole = |s: &LabeledSpan| s.start == 1 && s.end == gold_words;
    let by_length = |s: &&LabeledSpan| !whole(s);
    let mut whole_map = BTreeMap::new();
    breakdown(&gold_spans, &pred_spans, |s| whole(s), |_| (), &mut whole_map);
    score.whole_sentence = whole_map.remove(&()).unwrap_or_default();
    let by_label = |s: &&LabeledSpan| !whole(s) && (s.uppermost || !params.uppermost_only_by_label);

    breakdown(
        &gold_spans,
        &pred_spans,
        by_length,
        |s| params.bucket(s.len()),
        &mut score.per_length,
    );
    breakdown(
        &gold_spans,
        &pred_spans,
        by_label,
        |s| s.label.clone(),
        &mut score.per_label,
    );
    Ok(score)
}

fn breakdown<K: Ord>(
    gold: &[LabeledSpan],
    pred: &[LabeledSpan],
    keep: impl Fn(&&LabeledSpan) -> bool,
    bucket: impl Fn(&LabeledSpan) -> K,
    out: &mut BTreeMap<K, Counts>,
) {
    let g = multiset(gold.iter().filter(&keep));
    let p = multiset(pred.iter().filter(&keep));
    for s in gold.iter().filter(&keep) {
        out.entry(bucket(s)).or_default().gold += 1;
    }
    for s in pred.iter().filter(&keep) {
        out.entry(bucket(s)).or_default().predicted += 1;
    }
    for (key, &count) in &g {
        let m = count.min(p.get(key).copied().unwrap_or(0));
        if m > 0 {
            let span = gold.iter().find(|s| s.key() == *key).unwrap();
            out.entry(bucket(span)).or_default().matched += m;
        }
    }
}

/// Scores predicted trees against gold trees sentence by sentence.
pub fn bracketing_score(
    gold: &[Tree],
    pred: &[Tree],
    params: &EvalParams,
    execution: Execution,
) -> Result<BracketScore, MetricsError> {
    if gold.len() != pred.len() {
        return Err(MetricsError::CorpusLength {
            gold: gold.len(),
            predicted: pred.len(),
        });
    }
    let per_sentence = execution.map_range(gold.len(), |i| sentence_score(&gold[i], &pred[i], params, i));
    let mut total = BracketScore::default();
    for s in per_sentence {
        total.merge(&s?);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::read_bracketed;

    fn parse(s: &str) -> Tree {
        read_bracketed(s).unwrap().remove(0)
    }

    fn keys(spans: &[LabeledSpan]) -> Vec<(&str, usize, usize)> {
        let mut k: Vec<_> = spans.iter().map(LabeledSpan::key).collect();
        k.sort();
        k
    }

    const SAMPLE: &str = "(S (NP (DT The) (NN future)) (VP (VBZ is) (ADVP (RB now))) (. .))";

    #[test]
    fn spans_without_deletion() {
        let (spans, n) = extract_spans(&parse(SAMPLE), &EvalParams::empty());
        assert_eq!(n, 5);
        assert_eq!(
            keys(&spans),
            vec![("ADVP", 4, 4), ("NP", 1, 2), ("S", 1, 5), ("VP", 3, 4)]
        );
    }

    #[test]
    fn punctuation_deletion_drops_words() {
        let (spans, n) = extract_spans(&parse(SAMPLE), &EvalParams::default());
        assert_eq!(n, 4);
        assert!(spans.iter().all(|s| s.end <= 4));
        let (spans, _) = extract_spans(&parse("(S (NP (NN a)) (PRN (, ,)))"), &EvalParams::default());
        assert_eq!(keys(&spans), vec![("NP", 1, 1), ("S", 1, 1)]);
    }

    #[test]
    fn equivalence_rewrites_labels() {
        let mut p = EvalParams::empty();
        p.add_equivalence("PRT", "ADVP");
        let (spans, _) = extract_spans(&parse(SAMPLE), &p);
        assert!(spans.iter().any(|s| s.label == "PRT"));
        assert!(spans.iter().all(|s| s.label != "ADVP"));
    }

    #[test]
    fn unary_chains_expand() {
        let (spans, _) = extract_spans(&parse("(TOP (S (VP (VB go) (NN home))))"), &EvalParams::default());
        assert_eq!(keys(&spans), vec![("S", 1, 2), ("VP", 1, 2)]);
        assert!(spans.iter().find(|s| s.label == "S").unwrap().uppermost);
        assert!(!spans.iter().find(|s| s.label == "VP").unwrap().uppermost);
        // Collapsed and uncollapsed forms give the same brackets.
        let (collapsed, _) = extract_spans(&parse("(TOP+S+VP (VB go) (NN home))"), &EvalParams::default());
        assert_eq!(keys(&spans), keys(&collapsed));
    }

    #[test]
    fn identical_corpora_score_100() {
        let t = vec![parse(SAMPLE), parse("(S (NN a) (VB b))")];
        let s = bracketing_score(&t, &t, &EvalParams::default(), Execution::Sequential).unwrap();
        assert_eq!(s.f1(), 100.0);
        assert_eq!(s.exact, 2);
    }

    #[test]
    fn half_of_the_spans() {
        let gold = parse("(S (A (X a) (X b)) (B (X c) (X d)) (C (X e) (X f)) (D (X g) (X h)))");
        // Keeps S and two of the four inner brackets.
        let pred = parse("(S (A (X a) (X b)) (B (X c) (X d)) (X e) (X f) (X g) (X h))");
        let gold_t = vec![parse(&format!("(Z {})", gold)), parse("(S (X a) (X b))")];
        let pred_t = vec![parse(&format!("(Z {})", pred)), parse("(S (X a) (X b))")];
        let mut p = EvalParams::empty();
        p.delete_labels.insert("Z".into());
        p.delete_labels.insert("S".into());
        let s = bracketing_score(&gold_t, &pred_t, &p, Execution::Sequential).unwrap();
        assert_eq!(
            s.overall,
            Counts {
                gold: 4,
                predicted: 2,
                matched: 2
            }
        );
        assert_eq!(s.precision(), 100.0);
        assert_eq!(s.recall(), 50.0);
        assert!((s.f1() - 66.666_666_666_666_67).abs() < 1e-9);
    }

    #[test]
    fn mismatched_lengths() {
        let a = vec![parse("(S (X a) (X b))")];
        let b = vec![parse("(S (X a) (X b) (X c))")];
        assert_eq!(
            bracketing_score(&a, &b, &EvalParams::default(), Execution::Sequential),
            Err(MetricsError::SentenceLength {
                sentence: 0,
                gold: 2,
                predicted: 3
            })
        );
        assert!(matches!(
            bracketing_score(&a, &[], &EvalParams::default(), Execution::Sequential),
            Err(MetricsError::CorpusLength { .. })
        ));
    }

    #[test]
    fn whole_sentence_span_not_in_breakdowns() {
        let t = vec![parse(SAMPLE)];
        let s = bracketing_score(&t, &t, &EvalParams::empty(), Execution::Sequential).unwrap();
        assert!(!s.per_label.contains_key("S"));
        let total: u64 = s.per_length.values().map(|c| c.matched).sum();
        assert_eq!(total, 3);
        assert_eq!(total + s.whole_sentence.matched, s.overall.matched);
    }
}
