use std::collections::BTreeMap;

use super::{merge_maps, Counts, MetricsError};
use crate::dependency::DependencySentence;
use crate::parallel::Execution;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AttachmentOptions {
    /// Leave out tokens whose gold relation is `punct`.
    pub skip_punct: bool,
}

/// What a relation-level match requires.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RelationMatch {
    /// Correct head and relation.
    #[default]
    HeadAndLabel,
    /// Correct relation regardless of the head.
    LabelOnly,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AttachmentScore {
    pub tokens: u64,
    pub head_correct: u64,
    pub labeled_correct: u64,
    /// Keyed by signed `head - dependent`; an item matches only with the
    /// correct head and relation. Root attachments are kept in `root`.
    pub per_displacement: BTreeMap<i64, Counts>,
    pub root: Counts,
    /// Head-and-label matches per relation.
    pub per_relation: BTreeMap<String, Counts>,
}

impl AttachmentScore {
    pub fn uas(&self) -> f64 {
        percent(self.head_correct, self.tokens)
    }

    pub fn las(&self) -> f64 {
        percent(self.labeled_correct, self.tokens)
    }

    fn merge(&mut self, other: &AttachmentScore) {
        self.tokens += other.tokens;
        self.head_correct += other.head_correct;
        self.labeled_correct += other.labeled_correct;
        merge_maps(&mut self.per_displacement, &other.per_displacement);
        self.root += other.root;
        merge_maps(&mut self.per_relation, &other.per_relation);
    }
}

fn percent(num: u64, den: u64) -> f64 {
    if den == 0 {
        100.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

fn check_alignment(gold: &[DependencySentence], pred: &[DependencySentence]) -> Result<(), MetricsError> {
    if gold.len() != pred.len() {
        return Err(MetricsError::CorpusLength {
            gold: gold.len(),
            predicted: pred.len(),
        });
    }
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(MetricsError::SentenceLength {
                sentence: i,
                gold: g.len(),
                predicted: p.len(),
            });
        }
    }
    Ok(())
}

fn sentence_score(
    gold: &DependencySentence,
    pred: &DependencySentence,
    options: &AttachmentOptions,
) -> AttachmentScore {
    let mut score = AttachmentScore::default();
    for i in 0..gold.len() {
        let dependent = (i + 1) as i64;
        let (gh, ph) = (gold.heads[i], pred.heads[i]);
        let (gr, pr) = (&gold.deprels[i], &pred.deprels[i]);
        if options.skip_punct && gr == "punct" {
            continue;
        }
        let head_ok = gh == ph;
        let labeled_ok = head_ok && gr == pr;
        score.tokens += 1;
        score.head_correct += head_ok as u64;
        score.labeled_correct += labeled_ok as u64;

        let gold_bucket = match gh {
            0 => &mut score.root,
            h => score.per_displacement.entry(h as i64 - dependent).or_default(),
        };
        gold_bucket.gold += 1;
        gold_bucket.matched += labeled_ok as u64;
        match ph {
            0 => score.root.predicted += 1,
            h => {
                score
                    .per_displacement
                    .entry(h as i64 - dependent)
                    .or_default()
                    .predicted += 1
            }
        }

        score.per_relation.entry(gr.clone()).or_default().gold += 1;
        score.per_relation.entry(pr.clone()).or_default().predicted += 1;
        if labeled_ok {
            score.per_relation.get_mut(gr).unwrap().matched += 1;
        }
    }
    score
}

/// UAS, LAS and their displacement and relation breakdowns.
pub fn attachment_score(
    gold: &[DependencySentence],
    pred: &[DependencySentence],
    options: &AttachmentOptions,
    execution: Execution,
) -> Result<AttachmentScore, MetricsError> {
    check_alignment(gold, pred)?;
    let parts = execution.map_range(gold.len(), |i| sentence_score(&gold[i], &pred[i], options));
    let mut total = AttachmentScore::default();
    for part in &parts {
        total.merge(part);
    }
    Ok(total)
}

/// Per-displacement counts; see [`AttachmentScore::per_displacement`].
pub fn displacement_f1(
    gold: &[DependencySentence],
    pred: &[DependencySentence],
) -> Result<BTreeMap<i64, Counts>, MetricsError> {
    attachment_score(gold, pred, &AttachmentOptions::default(), Execution::Sequential).map(|s| s.per_displacement)
}

/// Per-relation counts under the chosen matching rule.
pub fn relation_f1(
    gold: &[DependencySentence],
    pred: &[DependencySentence],
    mode: RelationMatch,
) -> Result<BTreeMap<String, Counts>, MetricsError> {
    check_alignment(gold, pred)?;
    let mut out: BTreeMap<String, Counts> = BTreeMap::new();
    for (g, p) in gold.iter().zip(pred) {
        for i in 0..g.len() {
            let (gr, pr) = (&g.deprels[i], &p.deprels[i]);
            out.entry(gr.clone()).or_default().gold += 1;
            out.entry(pr.clone()).or_default().predicted += 1;
            let matched = gr == pr && (mode == RelationMatch::LabelOnly || g.heads[i] == p.heads[i]);
            if matched {
                out.get_mut(gr).unwrap().matched += 1;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sent(rows: &[(usize, &str)]) -> DependencySentence {
        DependencySentence::from_rows(rows.iter().map(|&(h, d)| ("w", "X", h, d)))
    }

    #[test]
    fn identical_corpora() {
        let g = vec![sent(&[(2, "det"), (0, "root"), (2, "punct")])];
        let s = attachment_score(&g, &g, &AttachmentOptions::default(), Execution::Sequential).unwrap();
        assert_eq!(s.uas(), 100.0);
        assert_eq!(s.las(), 100.0);
        assert!(s.per_displacement.values().all(|c| c.f1() == 100.0));
    }

    #[test]
    fn half_relations_wrong() {
        let g = vec![sent(&[(2, "det"), (0, "root"), (2, "obj"), (3, "amod")])];
        let p = vec![sent(&[(2, "det"), (0, "root"), (2, "nsubj"), (3, "nmod")])];
        let s = attachment_score(&g, &p, &AttachmentOptions::default(), Execution::Sequential).unwrap();
        assert_eq!(s.uas(), 100.0);
        assert_eq!(s.las(), 50.0);
    }

    #[test]
    fn displacement_sign() {
        // Gold arc head=3 dep=1.
        let g = vec![sent(&[(3, "det"), (3, "amod"), (0, "root")])];
        let d = displacement_f1(&g, &g).unwrap();
        assert_eq!(d[&2].gold, 1);
        assert_eq!(d[&1].gold, 1);
    }

    #[test]
    fn relation_f1_head_penalized() {
        let g = vec![sent(&[(2, "det"), (3, "nsubj"), (0, "root")])];
        let p = vec![sent(&[(2, "det"), (1, "nsubj"), (0, "root")])];
        let r = relation_f1(&g, &p, RelationMatch::HeadAndLabel).unwrap();
        assert_eq!(r["det"].f1(), 100.0);
        assert_eq!(r["nsubj"].f1(), 0.0);
        let r = relation_f1(&g, &p, RelationMatch::LabelOnly).unwrap();
        assert_eq!(r["nsubj"].f1(), 100.0);
    }

    #[test]
    fn punct_can_be_skipped() {
        let g = vec![sent(&[(0, "root"), (1, "punct")])];
        let p = vec![sent(&[(0, "root"), (0, "punct")])];
        let opts = AttachmentOptions { skip_punct: true };
        let s = attachment_score(&g, &p, &opts, Execution::Sequential).unwrap();
        assert_eq!(s.tokens, 1);
        assert_eq!(s.uas(), 100.0);
    }

    #[test]
    fn misaligned_corpora() {
        let g = vec![sent(&[(0, "root")])];
        let p = vec![sent(&[(0, "root"), (1, "x")])];
        assert!(matches!(
            attachment_score(&g, &p, &AttachmentOptions::default(), Execution::Sequential),
            Err(MetricsError::SentenceLength { sentence: 0, .. })
        ));
    }
}
