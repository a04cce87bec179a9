//! Readers and writers for treebanks, embeddings, token vectors and label
//! files.

mod bracketed;
mod conllu;
mod embeddings;
mod labels;
mod vectors;

pub use self::bracketed::{read_bracketed, write_bracketed};
pub use self::conllu::{read_conllu, write_conllu, write_conllu_corpus, PosColumn};
pub use self::embeddings::{read_embeddings, read_embeddings_filtered, EmbeddingTable};
pub use self::labels::{read_labels, write_labels, LabeledSentence};
pub use self::vectors::{read_token_vectors, TokenVectorFile};

/// Error raised while reading one of the supported text formats.
#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("sentence {sentence}: {message}")]
    Alignment { sentence: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FormatError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        FormatError::Syntax {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn alignment(sentence: usize, message: impl Into<String>) -> Self {
        FormatError::Alignment {
            sentence,
            message: message.into(),
        }
    }
}

/// Splits text into blank-line delimited blocks, yielding the 1-based line
/// number of each block's first line alongside its lines.
pub(crate) fn blocks(text: &str) -> Vec<(usize, Vec<(usize, &str)>)> {
    let mut out = Vec::new();
    let mut current: Vec<(usize, &str)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                out.push((current[0].0, std::mem::take(&mut current)));
            }
        } else {
            current.push((i + 1, line));
        }
    }
    if !current.is_empty() {
        out.push((current[0].0, current));
    }
    out
}
