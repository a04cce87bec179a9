use std::collections::HashMap;

use crate::const_codec::ConstLabel;
use crate::dep_codec::DepLabel;
use crate::Formalism;

/// Class name of the reserved unknown-label class.
pub const UNK_LABEL: &str = "<UNK>";

/// Bijection between atomic label strings and class indices.
///
/// Class 0 is reserved for labels unseen in training. The remaining classes
/// are ordered by descending training frequency, ties broken by the label
/// string, so the mapping does not depend on corpus order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelVocab {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    fallback: String,
}

impl LabelVocab {
    pub const UNK: usize = 0;

    /// Builds the vocabulary from training labels. `fallback` is what a
    /// prediction of the UNK class decodes to; see [`fallback_label`].
    pub fn from_labels<'a>(labels: impl IntoIterator<Item = &'a str>, fallback: String) -> Self {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for l in labels {
            *counts.entry(l).or_insert(0) += 1;
        }
        let mut sorted: Vec<(&str, usize)> = counts.into_iter().filter(|(l, _)| *l != UNK_LABEL).collect();
        sorted.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        let labels: Vec<String> = std::iter::once(UNK_LABEL.to_owned())
            .chain(sorted.into_iter().map(|(l, _)| l.to_owned()))
            .collect();
        Self::from_ordered(labels, fallback)
    }

    /// Rebuilds a vocabulary whose class order is already fixed (first entry
    /// must be the UNK class).
    pub fn from_ordered(labels: Vec<String>, fallback: String) -> Self {
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        LabelVocab {
            labels,
            index,
            fallback,
        }
    }

    /// Number of classes, UNK included.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.len() <= 1
    }

    /// Class of `label`, UNK when unseen.
    pub fn class(&self, label: &str) -> usize {
        self.index.get(label).copied().unwrap_or(Self::UNK)
    }

    /// Label string emitted for `class`; the UNK class yields the fallback.
    pub fn label(&self, class: usize) -> &str {
        if class == Self::UNK {
            &self.fallback
        } else {
            &self.labels[class]
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn fallback(&self) -> &str {
        &self.fallback
    }
}

/// The label an UNK prediction decodes to: for constituents one level down
/// under the most frequent nonterminal, for dependencies an attachment to
/// the root with the most frequent relation. Repairs absorb the rest.
pub fn fallback_label<'a>(formalism: Formalism, labels: impl IntoIterator<Item = &'a str>) -> String {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for l in labels {
        let key = match formalism {
            Formalism::Constituent => match l.parse::<ConstLabel>() {
                Ok(ConstLabel::Pair { c, .. }) => c,
                _ => continue,
            },
            Formalism::Dependency => match l.parse::<DepLabel>() {
                Ok(d) => d.deprel,
                Err(_) => continue,
            },
        };
        *counts.entry(key).or_insert(0) += 1;
    }
    let best = counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(k, _)| k);
    match formalism {
        Formalism::Constituent => {
            ConstLabel::fallback(best.as_deref().unwrap_or(crate::const_codec::DEFAULT_ROOT)).to_string()
        }
        Formalism::Dependency => DepLabel::root(best.as_deref().unwrap_or("dep")).to_string(),
    }
}
