use super::FormatError;
use crate::tree::Tree;

/// Label given to an unlabeled outermost bracket, as in `( (S ...) )`.
const UNLABELED_ROOT: &str = "TOP";

#[derive(Debug, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(text: &str) -> Vec<(usize, Tok<'_>)> {
    let mut toks = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut rest = line;
        while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
            rest = &rest[start..];
            if let Some(r) = rest.strip_prefix('(') {
                toks.push((lineno + 1, Tok::Open));
                rest = r;
            } else if let Some(r) = rest.strip_prefix(')') {
                toks.push((lineno + 1, Tok::Close));
                rest = r;
            } else {
                let end = rest
                    .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
                    .unwrap_or(rest.len());
                toks.push((lineno + 1, Tok::Atom(&rest[..end])));
                rest = &rest[end..];
            }
        }
    }
    toks
}

/// Parses zero or more bracketed trees.
///
/// A preterminal is a bracket holding exactly one atom, e.g. `(NN word)`.
/// Escaped brackets such as `-LRB-` are ordinary atoms and kept verbatim.
pub fn read_bracketed(text: &str) -> Result<Vec<Tree>, FormatError> {
    let toks = tokenize(text);
    let mut pos = 0;
    let mut trees = Vec::new();
    while pos < toks.len() {
        match toks[pos] {
            (_, Tok::Open) => trees.push(parse_node(&toks, &mut pos)?),
            (line, Tok::Close) => return Err(FormatError::syntax(line, "unbalanced ')'")),
            (line, Tok::Atom(a)) => return Err(FormatError::syntax(line, format!("atom {:?} outside brackets", a))),
        }
    }
    Ok(trees)
}

fn parse_node(toks: &[(usize, Tok<'_>)], pos: &mut usize) -> Result<Tree, FormatError> {
    let open_line = toks[*pos].0;
    *pos += 1;

    let label = match toks.get(*pos) {
        Some((_, Tok::Atom(a))) => {
            *pos += 1;
            Some(a.to_string())
        }
        _ => None,
    };

    let mut subtrees = Vec::new();
    let mut atoms = Vec::new();
    loop {
        match toks.get(*pos) {
            None => {
                return Err(FormatError::syntax(
                    open_line,
                    "unbalanced '(': missing closing bracket",
                ))
            }
            Some((_, Tok::Close)) => {
                *pos += 1;
                break;
            }
            Some((_, Tok::Open)) => subtrees.push(parse_node(toks, pos)?),
            Some((line, Tok::Atom(a))) => {
                atoms.push((*line, *a));
                *pos += 1;
            }
        }
    }

    match (label, atoms.as_slice(), subtrees.is_empty()) {
        (Some(pos_tag), [(_, word)], true) => Ok(Tree::leaf(pos_tag, *word)),
        (_, [], true) => Err(FormatError::syntax(open_line, "node without children")),
        (label, [], false) => Ok(Tree::node(label.unwrap_or_else(|| UNLABELED_ROOT.to_owned()), subtrees)),
        (None, [(line, _), ..], true) => Err(FormatError::syntax(*line, "leaf without a PoS tag")),
        (_, [(line, _), ..], _) => Err(FormatError::syntax(
            *line,
            "a bracket must hold either one word or only subtrees",
        )),
    }
}

/// Renders a tree on a single line.
pub fn write_bracketed(tree: &Tree) -> String {
    tree.to_string()
}
