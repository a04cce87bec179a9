//! Constituent trees as one label per word.
//!
//! Each word `w_i` (except the last) gets a triple `(n, c, u)`: `n` is the
//! number of tree levels `w_i` shares with `w_{i+1}` (absolute for the first
//! word, a delta w.r.t. the previous word afterwards), `c` is the label of
//! their lowest common ancestor and `u` the unary chain sitting directly above
//! the word's preterminal, if any. The last word gets an `EOS` label that
//! carries only `u`.
//!
//! Levels are counted on the unary-collapsed tree, excluding leaf unary
//! nodes, so every counted level branches and the encoding is injective.

use std::fmt;
use std::str::FromStr;

use crate::tree::{Tree, UNARY_SEPARATOR};

/// Separator between the fields of a serialized label.
pub const FIELD_SEPARATOR: char = '@';

/// Serialized form of the end-of-sentence label.
pub const EOS: &str = "EOS";

/// Root label used when decoding yields an unlabeled root and the label
/// sequence offers no nonterminal at all.
pub const DEFAULT_ROOT: &str = "S";

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConstCodecError {
    #[error("cannot encode an invalid tree: {0}")]
    InvalidTree(#[from] crate::tree::TreeDefect),
    #[error("cannot decode an empty sentence")]
    Empty,
    #[error("{labels} labels for {words} words and {tags} tags")]
    LengthMismatch { labels: usize, words: usize, tags: usize },
    #[error("malformed constituent label {0:?}")]
    BadLabel(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConstLabel {
    /// Relation between a word and its right neighbour.
    Pair { n: i32, c: String, u: Option<String> },
    /// Label of the last word.
    Eos { u: Option<String> },
}

impl ConstLabel {
    pub fn leaf_unary(&self) -> Option<&str> {
        match self {
            ConstLabel::Pair { u, .. } | ConstLabel::Eos { u } => u.as_deref(),
        }
    }

    /// Label standing in for an unseen or unknown prediction: one level
    /// deeper than the previous word under `nonterminal`.
    pub fn fallback(nonterminal: &str) -> Self {
        ConstLabel::Pair {
            n: 1,
            c: nonterminal.to_owned(),
            u: None,
        }
    }
}

impl fmt::Display for ConstLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = match self {
            ConstLabel::Pair { n, c, u } => {
                write!(f, "{}{}{}", n, FIELD_SEPARATOR, c)?;
                u
            }
            ConstLabel::Eos { u } => {
                f.write_str(EOS)?;
                u
            }
        };
        if let Some(u) = u {
            write!(f, "{}{}", FIELD_SEPARATOR, u)?;
        }
        Ok(())
    }
}

impl FromStr for ConstLabel {
    type Err = ConstCodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConstCodecError::BadLabel(s.to_owned());
        let parts: Vec<&str> = s.split(FIELD_SEPARATOR).collect();
        let nonempty = |p: Option<&&str>| match p {
            Some(x) if !x.is_empty() => Ok(Some(x.to_string())),
            Some(_) => Err(bad()),
            None => Ok(None),
        };
        if parts[0] == EOS {
            if parts.len() > 2 {
                return Err(bad());
            }
            return Ok(ConstLabel::Eos {
                u: nonempty(parts.get(1))?,
            });
        }
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let n = parts[0].parse().map_err(|_| bad())?;
        let c = nonempty(parts.get(1))?.ok_or_else(bad)?;
        Ok(ConstLabel::Pair {
            n,
            c,
            u: nonempty(parts.get(2))?,
        })
    }
}

/// Parses predicted label strings, mapping anything malformed to a bare
/// `EOS` label (which contributes no level and no nonterminal). Returns the
/// labels and the number of malformed inputs.
pub fn parse_labels_lenient<S: AsRef<str>>(labels: &[S]) -> (Vec<ConstLabel>, usize) {
    let mut malformed = 0;
    let parsed = labels
        .iter()
        .map(|s| {
            s.as_ref().parse().unwrap_or_else(|_| {
                malformed += 1;
                ConstLabel::Eos { u: None }
            })
        })
        .collect();
    (parsed, malformed)
}

/// Merges every chain of single-child internal nodes into one node labeled
/// with the chain joined by `+`, top to bottom.
pub fn collapse_unaries(tree: &Tree) -> Tree {
    match tree {
        Tree::Leaf { .. } => tree.clone(),
        Tree::Node { label, children } => {
            if let [only] = children.as_slice() {
                if let Tree::Node {
                    label: child_label,
                    children: grandchildren,
                } = collapse_unaries(only)
                {
                    return Tree::Node {
                        label: format!("{}{}{}", label, UNARY_SEPARATOR, child_label),
                        children: grandchildren,
                    };
                }
            }
            Tree::Node {
                label: label.clone(),
                children: children.iter().map(collapse_unaries).collect(),
            }
        }
    }
}

/// Per-word view of a collapsed tree: branching ancestors (id, label) from
/// the root down, plus the leaf unary chain.
struct WordPath<'a> {
    ancestors: Vec<(usize, &'a str)>,
    unary: Option<&'a str>,
}

fn word_paths<'a>(tree: &'a Tree, path: &mut Vec<(usize, &'a str)>, next_id: &mut usize, out: &mut Vec<WordPath<'a>>) {
    match tree {
        Tree::Leaf { .. } => out.push(WordPath {
            ancestors: path.clone(),
            unary: None,
        }),
        Tree::Node { label, children } => {
            if let [Tree::Leaf { .. }] = children.as_slice() {
                out.push(WordPath {
                    ancestors: path.clone(),
                    unary: Some(label),
                });
                return;
            }
            path.push((*next_id, label));
            *next_id += 1;
            for child in children {
                word_paths(child, path, next_id, out);
            }
            path.pop();
        }
    }
}

/// Encodes a tree as one label per word. The tree is unary-collapsed first.
pub fn encode_const(tree: &Tree) -> Result<Vec<ConstLabel>, ConstCodecError> {
    tree.validate()?;
    let collapsed = collapse_unaries(tree);
    let mut paths = Vec::new();
    word_paths(&collapsed, &mut Vec::new(), &mut 0, &mut paths);

    let mut labels = Vec::with_capacity(paths.len());
    let mut previous = 0i32;
    for (i, pair) in paths.windows(2).enumerate() {
        let common = pair[0]
            .ancestors
            .iter()
            .zip(&pair[1].ancestors)
            .take_while(|(a, b)| a.0 == b.0)
            .count();
        let depth = common as i32;
        let n = if i == 0 { depth } else { depth - previous };
        previous = depth;
        labels.push(ConstLabel::Pair {
            n,
            c: pair[0].ancestors[common - 1].1.to_owned(),
            u: pair[0].unary.map(str::to_owned),
        });
    }
    let last = paths.last().expect("a valid tree has at least one word");
    labels.push(ConstLabel::Eos {
        u: last.unary.map(str::to_owned),
    });
    Ok(labels)
}

/// How often each repair fired while decoding one sentence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConstRepairs {
    /// Nodes that received a nonterminal different from their first one.
    pub conflicting_nonterminals: usize,
    /// Intermediate levels deleted because no nonterminal was assigned.
    pub empty_levels: usize,
    /// Absolute depths moved into the valid range.
    pub clamped_depths: usize,
    /// Roots that received no nonterminal and were given a fallback.
    pub relabeled_roots: usize,
}

impl ConstRepairs {
    pub fn total(&self) -> usize {
        self.conflicting_nonterminals + self.empty_levels + self.clamped_depths + self.relabeled_roots
    }
}

impl std::ops::AddAssign for ConstRepairs {
    fn add_assign(&mut self, rhs: Self) {
        self.conflicting_nonterminals += rhs.conflicting_nonterminals;
        self.empty_levels += rhs.empty_levels;
        self.clamped_depths += rhs.clamped_depths;
        self.relabeled_roots += rhs.relabeled_roots;
    }
}

enum Child {
    Node(usize),
    Word(usize),
}

struct ArenaNode {
    label: Option<String>,
    children: Vec<Child>,
}

/// Decodes a label sequence into a tree, applying the repairs.
pub fn decode_const(labels: &[ConstLabel], words: &[&str], tags: &[&str]) -> Result<Tree, ConstCodecError> {
    decode_const_with_repairs(labels, words, tags).map(|(tree, _)| tree)
}

/// Like [`decode_const`], also reporting which repairs fired.
///
/// Any label sequence of the right length decodes to a valid tree:
/// absolute depths are clamped to `1..=|w|-1`; a node predicted with several
/// nonterminals keeps the first (leftmost); levels that end up without a
/// nonterminal are deleted and their children attached to the level above.
pub fn decode_const_with_repairs(
    labels: &[ConstLabel],
    words: &[&str],
    tags: &[&str],
) -> Result<(Tree, ConstRepairs), ConstCodecError> {
    let n = words.len();
    if labels.len() != n || tags.len() != n {
        return Err(ConstCodecError::LengthMismatch {
            labels: labels.len(),
            words: n,
            tags: tags.len(),
        });
    }
    if n == 0 {
        return Err(ConstCodecError::Empty);
    }
    let mut repairs = ConstRepairs::default();
    let leaf = |i: usize| Tree::leaf(tags[i], words[i]);
    let wrap = |i: usize, u: Option<&str>| match u {
        Some(u) => Tree::node(u, vec![leaf(i)]),
        None => leaf(i),
    };
    if n == 1 {
        return Ok(match labels[0].leaf_unary() {
            Some(u) => (wrap(0, Some(u)), repairs),
            None => {
                repairs.relabeled_roots += 1;
                (Tree::node(root_fallback(labels), vec![leaf(0)]), repairs)
            }
        });
    }

    let max_depth = (n - 1) as i32;
    let mut arena = vec![ArenaNode {
        label: None,
        children: Vec::new(),
    }];
    let mut path: Vec<usize> = vec![0];
    let mut previous_depth = 1usize;
    let mut running = 0i32;

    for (i, label) in labels.iter().enumerate() {
        let depth = if i + 1 < n {
            let raw = match label {
                ConstLabel::Pair { n: delta, .. } if i == 0 => *delta,
                ConstLabel::Pair { n: delta, .. } => running.saturating_add(*delta),
                ConstLabel::Eos { .. } if i == 0 => 1,
                ConstLabel::Eos { .. } => running,
            };
            let clamped = raw.clamp(1, max_depth);
            if clamped != raw {
                repairs.clamped_depths += 1;
            }
            running = clamped;
            clamped as usize
        } else {
            0
        };

        path.truncate(previous_depth.max(1));
        while path.len() < depth.max(previous_depth) {
            let parent = *path.last().unwrap();
            let id = arena.len();
            arena.push(ArenaNode {
                label: None,
                children: Vec::new(),
            });
            arena[parent].children.push(Child::Node(id));
            path.push(id);
        }

        let attach = *path.last().unwrap();
        match label.leaf_unary() {
            Some(u) => {
                let id = arena.len();
                arena.push(ArenaNode {
                    label: Some(u.to_owned()),
                    children: vec![Child::Word(i)],
                });
                arena[attach].children.push(Child::Node(id));
            }
            None => arena[attach].children.push(Child::Word(i)),
        }

        if let (ConstLabel::Pair { c, .. }, true) = (label, depth >= 1) {
            let node = &mut arena[path[depth - 1]];
            match &node.label {
                None => node.label = Some(c.clone()),
                Some(existing) if existing != c => repairs.conflicting_nonterminals += 1,
                Some(_) => {}
            }
        }
        previous_depth = depth;
    }

    let mut forest = build_forest(&arena, 0, &leaf, &mut repairs);
    let root = match arena[0].label {
        Some(_) => forest.pop().expect("labeled root yields one tree"),
        None => {
            // The root level was counted as empty by build_forest.
            repairs.empty_levels -= 1;
            if forest.len() == 1 && !forest[0].is_leaf() {
                forest.pop().unwrap()
            } else {
                repairs.relabeled_roots += 1;
                Tree::node(root_fallback(labels), forest)
            }
        }
    };
    Ok((collapse_unaries(&root), repairs))
}

/// Label for a root that received none: the first predicted nonterminal.
fn root_fallback(labels: &[ConstLabel]) -> &str {
    labels
        .iter()
        .find_map(|l| match l {
            ConstLabel::Pair { c, .. } => Some(c.as_str()),
            ConstLabel::Eos { .. } => None,
        })
        .unwrap_or(DEFAULT_ROOT)
}

fn build_forest(arena: &[ArenaNode], id: usize, leaf: &dyn Fn(usize) -> Tree, repairs: &mut ConstRepairs) -> Vec<Tree> {
    let mut children = Vec::new();
    for child in &arena[id].children {
        match *child {
            Child::Word(i) => children.push(leaf(i)),
            Child::Node(c) => children.extend(build_forest(arena, c, leaf, repairs)),
        }
    }
    match &arena[id].label {
        Some(label) => vec![Tree::node(label.clone(), children)],
        None => {
            repairs.empty_levels += 1;
            children
        }
    }
}
