//! Labeled bracketing and attachment scores, with the span-length,
//! span-label, displacement and relation breakdowns.
//!
//! Everything is computed from integer counts per sentence and summed, so
//! sequential and parallel evaluation agree exactly.

mod attachment;
mod bracketing;
mod params;
mod report;

use std::ops::{Add, AddAssign};

pub use self::attachment::{
    attachment_score, displacement_f1, relation_f1, AttachmentOptions, AttachmentScore, RelationMatch,
};
pub use self::bracketing::{bracketing_score, extract_spans, BracketScore, LabeledSpan};
pub use self::params::{EvalParams, LengthBucket};
pub use self::report::{attachment_report, attachment_tsv, bracket_report, bracket_tsv};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("gold has {gold} sentences, prediction has {predicted}")]
    CorpusLength { gold: usize, predicted: usize },
    #[error("sentence {sentence}: gold has {gold} words, prediction has {predicted}")]
    SentenceLength {
        sentence: usize,
        gold: usize,
        predicted: usize,
    },
    #[error("parameter file line {line}: {message}")]
    Params { line: usize, message: String },
}

/// Gold, predicted and matched item counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub gold: u64,
    pub predicted: u64,
    pub matched: u64,
}

impl Counts {
    /// Precision in percent. An empty prediction against an empty gold is
    /// perfect; an empty prediction against a non-empty gold scores 0.
    pub fn precision(&self) -> f64 {
        ratio(self.matched, self.predicted, self.gold == 0)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.matched, self.gold, self.predicted == 0)
    }

    /// Harmonic mean of precision and recall, 0 when both are 0.
    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

fn ratio(num: u64, den: u64, vacuous: bool) -> f64 {
    if den == 0 {
        if vacuous {
            100.0
        } else {
            0.0
        }
    } else {
        100.0 * num as f64 / den as f64
    }
}

impl Add for Counts {
    type Output = Counts;

    fn add(self, rhs: Counts) -> Counts {
        Counts {
            gold: self.gold + rhs.gold,
            predicted: self.predicted + rhs.predicted,
            matched: self.matched + rhs.matched,
        }
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, rhs: Counts) {
        *self = *self + rhs;
    }
}

fn merge_maps<K: Ord + Clone>(
    into: &mut std::collections::BTreeMap<K, Counts>,
    from: &std::collections::BTreeMap<K, Counts>,
) {
    for (k, v) in from {
        *into.entry(k.clone()).or_default() += *v;
    }
}
