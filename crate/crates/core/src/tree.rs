//! Phrase-structure trees.

use std::fmt;

/// Separator joining the labels of a collapsed unary chain, top to bottom.
pub const UNARY_SEPARATOR: char = '+';

/// A rooted, ordered constituent tree.
///
/// Preterminals and their words are fused into [`Tree::Leaf`], so every word
/// has exactly one PoS-labeled parent by construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tree {
    Node { label: String, children: Vec<Tree> },
    Leaf { pos: String, word: String },
}

/// A structural defect found by [`Tree::validate`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TreeDefect {
    #[error("internal node without children")]
    EmptyNode,
    #[error("node with an empty label")]
    UnlabeledNode,
    #[error("leaf with an empty word or PoS tag")]
    EmptyLeaf,
}

impl Tree {
    pub fn node(label: impl Into<String>, children: Vec<Tree>) -> Self {
        Tree::Node {
            label: label.into(),
            children,
        }
    }

    pub fn leaf(pos: impl Into<String>, word: impl Into<String>) -> Self {
        Tree::Leaf {
            pos: pos.into(),
            word: word.into(),
        }
    }

    /// Label of the node: the nonterminal for internal nodes, the PoS tag for
    /// leaves.
    pub fn label(&self) -> &str {
        match self {
            Tree::Node { label, .. } => label,
            Tree::Leaf { pos, .. } => pos,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Tree::Leaf { .. })
    }

    pub fn children(&self) -> &[Tree] {
        match self {
            Tree::Node { children, .. } => children,
            Tree::Leaf { .. } => &[],
        }
    }

    /// Number of words. A tree always has at least one.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        match self {
            Tree::Leaf { .. } => 1,
            Tree::Node { children, .. } => children.iter().map(Tree::len).sum(),
        }
    }

    /// Words in sentence order.
    pub fn words(&self) -> Vec<&str> {
        self.leaves().map(|(_, w)| w).collect()
    }

    /// PoS tags in sentence order.
    pub fn tags(&self) -> Vec<&str> {
        self.leaves().map(|(p, _)| p).collect()
    }

    /// `(pos, word)` pairs in sentence order.
    pub fn leaves(&self) -> impl Iterator<Item = (&str, &str)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out.into_iter()
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<(&'a str, &'a str)>) {
        match self {
            Tree::Leaf { pos, word } => out.push((pos, word)),
            Tree::Node { children, .. } => {
                for child in children {
                    child.collect_leaves(out);
                }
            }
        }
    }

    /// Number of internal (non-leaf) nodes.
    pub fn internal_count(&self) -> usize {
        match self {
            Tree::Leaf { .. } => 0,
            Tree::Node { children, .. } => 1 + children.iter().map(Tree::internal_count).sum::<usize>(),
        }
    }

    /// Checks the structural invariants: every internal node is labeled and
    /// has at least one child, and every leaf carries a word and a tag.
    pub fn validate(&self) -> Result<(), TreeDefect> {
        match self {
            Tree::Leaf { pos, word } => {
                if pos.is_empty() || word.is_empty() {
                    Err(TreeDefect::EmptyLeaf)
                } else {
                    Ok(())
                }
            }
            Tree::Node { label, children } => {
                if label.is_empty() {
                    return Err(TreeDefect::UnlabeledNode);
                }
                if children.is_empty() {
                    return Err(TreeDefect::EmptyNode);
                }
                children.iter().try_for_each(Tree::validate)
            }
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf { pos, word } => write!(f, "({} {})", pos, word),
            Tree::Node { label, children } => {
                write!(f, "({}", label)?;
                for child in children {
                    write!(f, " {}", child)?;
                }
                write!(f, ")")
            }
        }
    }
}
