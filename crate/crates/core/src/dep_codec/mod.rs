//! Dependency trees as one label per word.
//!
//! The head of word `i` is written as `(o, p)`: the `o`-th closest word to the
//! right with PoS tag `p` when `o > 0`, the `-o`-th closest to the left when
//! `o < 0`. Position 0 is a virtual root carrying the reserved tag
//! [`ROOT_POS`], so the root word is labeled `(-1, ROOT_POS, d)`.

mod cycles;
mod repair;

use std::fmt;
use std::str::FromStr;

pub use self::cycles::detect_cycles;
pub use self::repair::{repair_tree, DepRepairs};
use crate::dependency::{DepDefect, DependencySentence, Token};

/// Tag of the virtual root at position 0.
pub const ROOT_POS: &str = "<ROOT>";

/// Separator between the fields of a serialized label.
pub const FIELD_SEPARATOR: char = '@';

/// Relation given to tokens whose label could not be parsed.
pub const UNKNOWN_RELATION: &str = "dep";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DepCodecError {
    #[error("cannot encode an invalid tree: {0}")]
    InvalidTree(#[from] DepDefect),
    #[error("token {0} uses the reserved root tag")]
    ReservedTag(usize),
    #[error("cannot decode an empty sentence")]
    Empty,
    #[error("{labels} labels for {words} words and {tags} tags")]
    LengthMismatch { labels: usize, words: usize, tags: usize },
    #[error("malformed dependency label {0:?}")]
    BadLabel(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DepLabel {
    /// Signed rank of the head among the words tagged `pos`; never 0.
    pub offset: i32,
    pub pos: String,
    pub deprel: String,
}

impl DepLabel {
    /// Label attaching a word to the virtual root.
    pub fn root(deprel: impl Into<String>) -> Self {
        DepLabel {
            offset: -1,
            pos: ROOT_POS.to_owned(),
            deprel: deprel.into(),
        }
    }
}

impl fmt::Display for DepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{sep}{}{sep}{}",
            self.offset,
            self.pos,
            self.deprel,
            sep = FIELD_SEPARATOR
        )
    }
}

impl FromStr for DepLabel {
    type Err = DepCodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DepCodecError::BadLabel(s.to_owned());
        let mut parts = s.splitn(3, FIELD_SEPARATOR);
        let offset: i32 = parts.next().and_then(|o| o.parse().ok()).ok_or_else(bad)?;
        let pos = parts.next().filter(|p| !p.is_empty()).ok_or_else(bad)?;
        let deprel = parts.next().filter(|d| !d.is_empty()).ok_or_else(bad)?;
        if offset == 0 {
            return Err(bad());
        }
        Ok(DepLabel {
            offset,
            pos: pos.to_owned(),
            deprel: deprel.to_owned(),
        })
    }
}

/// Offset of `head` as seen from `dependent` over `tags`, where `tags[0]` is
/// the virtual root.
fn offset_of(tags: &[&str], dependent: usize, head: usize) -> i32 {
    let pos = tags[head];
    if head > dependent {
        tags[dependent + 1..=head].iter().filter(|&&t| t == pos).count() as i32
    } else {
        -(tags[head..dependent].iter().filter(|&&t| t == pos).count() as i32)
    }
}

/// Resolves `(offset, pos)` from `dependent` to a position in `tags`
/// (0 being the virtual root), or `None` when no such word exists.
pub fn resolve_head(tags: &[&str], dependent: usize, offset: i32, pos: &str) -> Option<usize> {
    let k = offset.unsigned_abs() as usize;
    if k == 0 {
        return None;
    }
    if offset > 0 {
        (dependent + 1..tags.len()).filter(|&j| tags[j] == pos).nth(k - 1)
    } else {
        (0..dependent).rev().filter(|&j| tags[j] == pos).nth(k - 1)
    }
}

fn with_root(tags: impl IntoIterator<Item = impl AsRef<str>>) -> Vec<String> {
    std::iter::once(ROOT_POS.to_owned())
        .chain(tags.into_iter().map(|t| t.as_ref().to_owned()))
        .collect()
}

/// Encodes a dependency tree. Non-projective trees are fine.
pub fn encode_dep(sentence: &DependencySentence) -> Result<Vec<DepLabel>, DepCodecError> {
    sentence.validate()?;
    if let Some(t) = sentence.tokens.iter().find(|t| t.pos == ROOT_POS) {
        return Err(DepCodecError::ReservedTag(t.index));
    }
    let owned = with_root(sentence.tokens.iter().map(|t| t.pos.as_str()));
    let tags: Vec<&str> = owned.iter().map(String::as_str).collect();
    Ok(sentence
        .heads
        .iter()
        .zip(&sentence.deprels)
        .enumerate()
        .map(|(i, (&head, rel))| {
            let dependent = i + 1;
            DepLabel {
                offset: offset_of(&tags, dependent, head),
                pos: tags[head].to_owned(),
                deprel: rel.clone(),
            }
        })
        .collect())
}

/// Decodes labels against the PoS sequence and repairs the result.
pub fn decode_dep(labels: &[DepLabel], words: &[&str], tags: &[&str]) -> Result<DependencySentence, DepCodecError> {
    decode_dep_with_repairs(labels, words, tags).map(|(s, _)| s)
}

pub fn decode_dep_with_repairs(
    labels: &[DepLabel],
    words: &[&str],
    tags: &[&str],
) -> Result<(DependencySentence, DepRepairs), DepCodecError> {
    let candidates: Vec<Option<&DepLabel>> = labels.iter().map(Some).collect();
    decode_candidates(&candidates, words, tags)
}

/// Decodes raw label strings; malformed strings count as unresolvable heads
/// with relation [`UNKNOWN_RELATION`].
pub fn decode_dep_lenient<S: AsRef<str>>(
    labels: &[S],
    words: &[&str],
    tags: &[&str],
) -> Result<(DependencySentence, DepRepairs, usize), DepCodecError> {
    let parsed: Vec<Option<DepLabel>> = labels.iter().map(|s| s.as_ref().parse().ok()).collect();
    let malformed = parsed.iter().filter(|p| p.is_none()).count();
    let candidates: Vec<Option<&DepLabel>> = parsed.iter().map(Option::as_ref).collect();
    let (sentence, repairs) = decode_candidates(&candidates, words, tags)?;
    Ok((sentence, repairs, malformed))
}

fn decode_candidates(
    labels: &[Option<&DepLabel>],
    words: &[&str],
    tags: &[&str],
) -> Result<(DependencySentence, DepRepairs), DepCodecError> {
    let n = words.len();
    if labels.len() != n || tags.len() != n {
        return Err(DepCodecError::LengthMismatch {
            labels: labels.len(),
            words: n,
            tags: tags.len(),
        });
    }
    if n == 0 {
        return Err(DepCodecError::Empty);
    }
    let owned = with_root(tags);
    let padded: Vec<&str> = owned.iter().map(String::as_str).collect();

    let candidates: Vec<Option<usize>> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| l.and_then(|l| resolve_head(&padded, i + 1, l.offset, &l.pos)))
        .collect();
    let deprels: Vec<String> = labels
        .iter()
        .map(|l| l.map_or(UNKNOWN_RELATION, |l| l.deprel.as_str()).to_owned())
        .collect();
    let (heads, repairs) = repair_tree(&candidates, &deprels);

    let tokens = words
        .iter()
        .zip(tags)
        .enumerate()
        .map(|(i, (w, t))| Token::new(i + 1, *w, *t))
        .collect();
    Ok((DependencySentence { tokens, heads, deprels }, repairs))
}
