use std::fmt::Write as _;

use super::{blocks, FormatError};

/// A sentence in `form<TAB>label` format.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabeledSentence {
    pub forms: Vec<String>,
    pub labels: Vec<String>,
}

impl LabeledSentence {
    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}

/// Reads a label file. A line without a tab is a bare form with an empty
/// label, which lets the same format serve as prediction input.
pub fn read_labels(text: &str) -> Result<Vec<LabeledSentence>, FormatError> {
    let mut out = Vec::new();
    for (_, lines) in blocks(text) {
        let mut sentence = LabeledSentence::default();
        for (lineno, line) in lines {
            let (form, label) = line.split_once('\t').unwrap_or((line, ""));
            if form.is_empty() {
                return Err(FormatError::syntax(lineno, "empty word form"));
            }
            sentence.forms.push(form.to_owned());
            sentence.labels.push(label.to_owned());
        }
        out.push(sentence);
    }
    Ok(out)
}

pub fn write_labels(sentences: &[LabeledSentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        for (form, label) in s.forms.iter().zip(&s.labels) {
            let _ = writeln!(out, "{}\t{}", form, label);
        }
        out.push('\n');
    }
    out
}
