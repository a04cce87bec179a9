//! Random trees and label sequences for property tests, fuzzing and
//! benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::const_codec::ConstLabel;
use crate::dep_codec::{DepLabel, ROOT_POS};
use crate::dependency::{validate_heads, DependencySentence};
use crate::tree::{Tree, UNARY_SEPARATOR};

/// Ten nonterminal symbols.
pub const NONTERMINALS: [&str; 10] = ["S", "NP", "VP", "PP", "ADJP", "ADVP", "SBAR", "QP", "WHNP", "PRN"];

pub const PRETERMINALS: [&str; 8] = ["DT", "NN", "NNS", "VBZ", "VBD", "IN", "JJ", "RB"];

pub const UPOS: [&str; 8] = ["NOUN", "VERB", "DET", "ADP", "ADJ", "PRON", "ADV", "PUNCT"];

pub const RELATIONS: [&str; 8] = ["nsubj", "obj", "det", "case", "amod", "advmod", "punct", "obl"];

/// Shape parameters for [`random_tree`].
#[derive(Clone, Debug)]
pub struct TreeShape {
    pub max_words: usize,
    /// Longest unary chain inserted above any node.
    pub max_unary: usize,
    /// Chance of inserting a unary chain above a node.
    pub unary_prob: f64,
    pub max_branching: usize,
}

impl Default for TreeShape {
    fn default() -> Self {
        TreeShape {
            max_words: 12,
            max_unary: 3,
            unary_prob: 0.25,
            max_branching: 4,
        }
    }
}

/// A random constituent tree over [`NONTERMINALS`] with words `w1..wn`.
pub fn random_tree<R: Rng>(rng: &mut R, shape: &TreeShape) -> Tree {
    let n = rng.gen_range(1..=shape.max_words.max(1));
    let mut next_word = 0;
    let tree = build(rng, shape, n, &mut next_word);
    // The root itself must be a nonterminal.
    if tree.is_leaf() {
        Tree::node(*NONTERMINALS.choose(rng).unwrap(), vec![tree])
    } else {
        tree
    }
}

fn build<R: Rng>(rng: &mut R, shape: &TreeShape, words: usize, next_word: &mut usize) -> Tree {
    let node = if words == 1 {
        *next_word += 1;
        Tree::leaf(*PRETERMINALS.choose(rng).unwrap(), format!("w{}", next_word))
    } else {
        let arity = rng.gen_range(2..=shape.max_branching.min(words).max(2));
        // Random composition of `words` into `arity` positive parts.
        let mut cuts: Vec<usize> = (1..words).collect();
        cuts.shuffle(rng);
        let mut cuts: Vec<usize> = cuts.into_iter().take(arity - 1).collect();
        cuts.sort_unstable();
        let mut children = Vec::with_capacity(arity);
        let mut start = 0;
        for end in cuts.into_iter().chain(std::iter::once(words)) {
            children.push(build(rng, shape, end - start, next_word));
            start = end;
        }
        Tree::node(*NONTERMINALS.choose(rng).unwrap(), children)
    };
    if shape.max_unary > 0 && rng.gen_bool(shape.unary_prob) {
        let depth = rng.gen_range(1..=shape.max_unary);
        (0..depth).fold(node, |t, _| Tree::node(*NONTERMINALS.choose(rng).unwrap(), vec![t]))
    } else {
        node
    }
}

/// A random labeled dependency tree with `1..=max_tokens` tokens.
///
/// Heads are sampled uniformly and assignments that are not single-rooted
/// trees are rejected, so non-projective trees occur freely.
pub fn random_dependency_sentence<R: Rng>(rng: &mut R, max_tokens: usize) -> DependencySentence {
    let n = rng.gen_range(1..=max_tokens.max(1));
    let heads = loop {
        let root = rng.gen_range(1..=n);
        let heads: Vec<usize> = (1..=n)
            .map(|t| {
                if t == root {
                    0
                } else {
                    let h = rng.gen_range(1..n);
                    if h >= t {
                        h + 1
                    } else {
                        h
                    }
                }
            })
            .collect();
        if validate_heads(&heads).is_ok() {
            break heads;
        }
    };
    let rows: Vec<(String, &str, usize, &str)> = heads
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let rel = if h == 0 {
                "root"
            } else {
                *RELATIONS.choose(rng).unwrap()
            };
            (format!("t{}", i + 1), *UPOS.choose(rng).unwrap(), h, rel)
        })
        .collect();
    DependencySentence::from_rows(rows.iter().map(|(f, p, h, d)| (f.as_str(), *p, *h, *d)))
}

fn random_chain<R: Rng>(rng: &mut R) -> String {
    let len = rng.gen_range(1..=2);
    (0..len)
        .map(|_| *NONTERMINALS.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(&UNARY_SEPARATOR.to_string())
}

/// Arbitrary constituent labels of length `n`, unrelated to any tree.
pub fn random_const_labels<R: Rng>(rng: &mut R, n: usize) -> Vec<ConstLabel> {
    (0..n)
        .map(|_| {
            let u = rng.gen_bool(0.2).then(|| random_chain(rng));
            if rng.gen_bool(0.1) {
                ConstLabel::Eos { u }
            } else {
                ConstLabel::Pair {
                    n: rng.gen_range(-4..=4),
                    c: if rng.gen_bool(0.2) {
                        random_chain(rng)
                    } else {
                        NONTERMINALS.choose(rng).unwrap().to_string()
                    },
                    u,
                }
            }
        })
        .collect()
}

/// Arbitrary dependency labels of length `n` over [`UPOS`] and the root tag.
pub fn random_dep_labels<R: Rng>(rng: &mut R, n: usize) -> Vec<DepLabel> {
    (0..n)
        .map(|_| {
            let mut offset = rng.gen_range(-3..=3);
            if offset == 0 {
                offset = 1;
            }
            let pos = if rng.gen_bool(0.15) {
                ROOT_POS
            } else {
                UPOS.choose(rng).unwrap()
            };
            let deprel = if rng.gen_bool(0.1) {
                "root"
            } else {
                RELATIONS.choose(rng).unwrap()
            };
            DepLabel {
                offset,
                pos: pos.to_owned(),
                deprel: deprel.to_owned(),
            }
        })
        .collect()
}

/// Random tag sequence of length `n` over [`UPOS`].
pub fn random_tags<R: Rng>(rng: &mut R, n: usize) -> Vec<&'static str> {
    (0..n).map(|_| *UPOS.choose(rng).unwrap()).collect()
}
