use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::MetricsError;

/// A span-length range `lo..=hi`; `hi == None` is the open tail bucket.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LengthBucket {
    pub lo: usize,
    pub hi: Option<usize>,
}

impl fmt::Display for LengthBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(hi) if hi == self.lo => write!(f, "{}", hi),
            Some(hi) => write!(f, "{}-{}", self.lo, hi),
            None => write!(f, ">{}", self.lo - 1),
        }
    }
}

/// Bracket-scoring parameters in the spirit of evalb's `.prm` files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalParams {
    /// Labels removed before scoring. Deleting a preterminal label removes
    /// its words; deleting a nonterminal removes the bracket.
    pub delete_labels: BTreeSet<String>,
    /// Label rewrites applied before comparison; values are canonical.
    pub equivalent_labels: BTreeMap<String, String>,
    /// Inclusive upper edges of the span-length buckets, ascending. Longer
    /// spans fall into a tail bucket.
    pub length_edges: Vec<usize>,
    /// Count only the top element of a unary chain in the per-label
    /// breakdown.
    pub uppermost_only_by_label: bool,
}

impl Default for EvalParams {
    /// The COLLINS.prm setup: drop the root symbol and punctuation
    /// preterminals, treat ADVP and PRT alike.
    fn default() -> Self {
        let mut params = EvalParams::empty();
        for label in ["TOP", "ROOT", "S1", "-NONE-", ",", ":", "``", "''", "."] {
            params.delete_labels.insert(label.to_owned());
        }
        params.add_equivalence("ADVP", "PRT");
        params
    }
}

impl EvalParams {
    /// No deletions, no equivalences, default buckets.
    pub fn empty() -> Self {
        EvalParams {
            delete_labels: BTreeSet::new(),
            equivalent_labels: BTreeMap::new(),
            length_edges: vec![1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 30],
            uppermost_only_by_label: true,
        }
    }

    /// Makes `other` score as `canonical`.
    pub fn add_equivalence(&mut self, canonical: &str, other: &str) {
        let canonical = self.canonical(canonical).to_owned();
        for v in self.equivalent_labels.values_mut() {
            if v == other {
                *v = canonical.clone();
            }
        }
        self.equivalent_labels.insert(other.to_owned(), canonical);
    }

    pub fn canonical<'a>(&'a self, label: &'a str) -> &'a str {
        self.equivalent_labels.get(label).map_or(label, String::as_str)
    }

    pub fn is_deleted(&self, label: &str) -> bool {
        self.delete_labels.contains(label)
    }

    pub fn bucket(&self, length: usize) -> LengthBucket {
        let mut lo = 1;
        for &edge in &self.length_edges {
            if length <= edge {
                return LengthBucket { lo, hi: Some(edge) };
            }
            lo = edge + 1;
        }
        LengthBucket { lo, hi: None }
    }

    /// Parses a parameter file. Each line is `KEY value` or `KEY=value`;
    /// `#` starts a comment. Recognized keys are `DELETE_LABEL`,
    /// `EQ_LABEL <canonical> <other>...`, `SPAN_LENGTH_EDGES 1,2,5` and
    /// `UNARY_UPPERMOST_ONLY 0|1`. Other evalb keys are accepted and
    /// ignored. The file replaces the defaults entirely.
    pub fn parse(text: &str) -> Result<Self, MetricsError> {
        let mut params = EvalParams::empty();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| MetricsError::Params {
                line: i + 1,
                message: message.to_owned(),
            };
            let (key, value) = match line.split_once('=') {
                Some((k, v)) => (k.trim(), v.trim()),
                None => line
                    .split_once(char::is_whitespace)
                    .map(|(k, v)| (k.trim(), v.trim()))
                    .unwrap_or((line, "")),
            };
            match key.to_ascii_uppercase().as_str() {
                "DELETE_LABEL" => {
                    if value.is_empty() {
                        return Err(err("DELETE_LABEL needs a label"));
                    }
                    params.delete_labels.insert(value.to_owned());
                }
                "EQ_LABEL" => {
                    let labels: Vec<&str> = value.split_whitespace().collect();
                    if labels.len() < 2 {
                        return Err(err("EQ_LABEL needs at least two labels"));
                    }
                    for other in &labels[1..] {
                        params.add_equivalence(labels[0], other);
                    }
                }
                "SPAN_LENGTH_EDGES" => {
                    let edges = value
                        .split(|c: char| c == ',' || c.is_whitespace())
                        .filter(|s| !s.is_empty())
                        .map(str::parse::<usize>)
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| err("edges must be positive integers"))?;
                    if edges.is_empty() || edges[0] == 0 || edges.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(err("edges must be positive and strictly ascending"));
                    }
                    params.length_edges = edges;
                }
                "UNARY_UPPERMOST_ONLY" => {
                    params.uppermost_only_by_label = match value {
                        "1" | "true" | "yes" => true,
                        "0" | "false" | "no" => false,
                        _ => return Err(err("expected 0 or 1")),
                    }
                }
                _ => {}
            }
        }
        Ok(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collins_defaults() {
        let p = EvalParams::default();
        assert!(p.is_deleted("TOP"));
        assert!(p.is_deleted("."));
        assert!(!p.is_deleted("NP"));
        assert_eq!(p.canonical("PRT"), "ADVP");
        assert_eq!(p.canonical("ADVP"), "ADVP");
    }

    #[test]
    fn parses_both_syntaxes() {
        let text = "\
## evalb style
DEBUG 0
DELETE_LABEL TOP
DELETE_LABEL=,
EQ_LABEL ADVP PRT
SPAN_LENGTH_EDGES=1,5,10
UNARY_UPPERMOST_ONLY 0
";
        let p = EvalParams::parse(text).unwrap();
        assert_eq!(p.delete_labels.len(), 2);
        assert!(p.is_deleted(","));
        assert_eq!(p.canonical("PRT"), "ADVP");
        assert_eq!(p.length_edges, vec![1, 5, 10]);
        assert!(!p.uppermost_only_by_label);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(EvalParams::parse("EQ_LABEL ADVP").is_err());
        assert!(EvalParams::parse("SPAN_LENGTH_EDGES 5,2").is_err());
        assert!(EvalParams::parse("DELETE_LABEL").is_err());
    }

    #[test]
    fn equivalence_is_idempotent() {
        let mut p = EvalParams::empty();
        p.add_equivalence("B", "C");
        p.add_equivalence("A", "B");
        for label in ["A", "B", "C", "D"] {
            let once = p.canonical(label);
            assert_eq!(p.canonical(once), once);
        }
        assert_eq!(p.canonical("C"), "A");
    }

    #[test]
    fn buckets() {
        let mut p = EvalParams::empty();
        p.length_edges = vec![1, 2, 5];
        assert_eq!(p.bucket(1).to_string(), "1");
        assert_eq!(p.bucket(2).to_string(), "2");
        assert_eq!(p.bucket(4).to_string(), "3-5");
        assert_eq!(p.bucket(9).to_string(), ">5");
    }
}
