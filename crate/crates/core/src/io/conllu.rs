use std::fmt::Write as _;
use std::str::FromStr;

use super::{blocks, FormatError};
use crate::dependency::{DependencySentence, Token};

/// Which CoNLL-U column supplies the PoS tag.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PosColumn {
    #[default]
    Upos,
    Xpos,
}

impl FromStr for PosColumn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "upos" => Ok(PosColumn::Upos),
            "xpos" => Ok(PosColumn::Xpos),
            other => Err(format!("unknown PoS column {:?} (expected upos or xpos)", other)),
        }
    }
}

/// Reads CoNLL-U sentences.
///
/// Comment lines, multiword-token ranges (`3-4`) and empty nodes (`5.1`) are
/// skipped; only the basic syntactic words are kept.
pub fn read_conllu(text: &str, pos_column: PosColumn) -> Result<Vec<DependencySentence>, FormatError> {
    let mut sentences = Vec::new();
    for (_, lines) in blocks(text) {
        let mut sentence = DependencySentence {
            tokens: Vec::new(),
            heads: Vec::new(),
            deprels: Vec::new(),
        };
        let mut head_lines = Vec::new();
        for (lineno, line) in lines {
            if line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 10 {
                return Err(FormatError::syntax(
                    lineno,
                    format!("expected 10 tab-separated columns, found {}", cols.len()),
                ));
            }
            if cols[0].contains('-') || cols[0].contains('.') {
                continue;
            }
            let id: usize = cols[0]
                .parse()
                .map_err(|_| FormatError::syntax(lineno, format!("invalid token id {:?}", cols[0])))?;
            if id != sentence.tokens.len() + 1 {
                return Err(FormatError::syntax(lineno, format!("token id {} out of sequence", id)));
            }
            let head: usize = cols[6]
                .parse()
                .map_err(|_| FormatError::syntax(lineno, format!("non-integer head {:?}", cols[6])))?;
            let pos = match pos_column {
                PosColumn::Upos => cols[3],
                PosColumn::Xpos => cols[4],
            };
            sentence.tokens.push(Token::new(id, cols[1], pos));
            sentence.heads.push(head);
            sentence.deprels.push(cols[7].to_owned());
            head_lines.push(lineno);
        }
        let n = sentence.tokens.len();
        if n == 0 {
            continue;
        }
        for (&head, &lineno) in sentence.heads.iter().zip(&head_lines) {
            if head > n {
                return Err(FormatError::syntax(
                    lineno,
                    format!("head {} out of range for a {}-token sentence", head, n),
                ));
            }
        }
        sentences.push(sentence);
    }
    Ok(sentences)
}

/// Writes one sentence as 10-column CoNLL-U rows followed by a blank line.
/// Columns not modeled here are emitted as `_`.
pub fn write_conllu(sentence: &DependencySentence, pos_column: PosColumn) -> String {
    let mut out = String::new();
    for (i, token) in sentence.tokens.iter().enumerate() {
        let (upos, xpos) = match pos_column {
            PosColumn::Upos => (token.pos.as_str(), "_"),
            PosColumn::Xpos => ("_", token.pos.as_str()),
        };
        let _ = writeln!(
            out,
            "{}\t{}\t_\t{}\t{}\t_\t{}\t{}\t_\t_",
            i + 1,
            token.form,
            upos,
            xpos,
            sentence.heads[i],
            sentence.deprels[i]
        );
    }
    out.push('\n');
    out
}

pub fn write_conllu_corpus(sentences: &[DependencySentence], pos_column: PosColumn) -> String {
    sentences.iter().map(|s| write_conllu(s, pos_column)).collect()
}
