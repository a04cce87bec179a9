//! The limited-expression probe: one linear layer plus softmax that maps
//! each word vector to an atomic tree-encoding label.

mod checkpoint;
mod embed;
mod probe;
mod train;
mod vocab;

pub use self::checkpoint::{load_model, read_model, save_model, write_model, CHECKPOINT_VERSION};
pub use self::embed::{
    add_boundary_rows, embed_sentence, init_random_embeddings, random_bound, EmbeddingSource, BOS, EOS,
};
pub use self::probe::{softmax_in_place, Gradients, LinearProbe, Mode};
pub use self::train::{epoch_log_tsv, predict, train, Corpus, EpochLog, SourceKind, TrainConfig, TrainedModel};
pub use self::vocab::{fallback_label, LabelVocab, UNK_LABEL};

use crate::io::FormatError;

#[derive(Debug, thiserror::Error)]
pub enum TaggerError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("training corpus has no labeled tokens")]
    EmptyCorpus,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("sentence {sentence}: {message}")]
    Alignment { sentence: usize, message: String },
    #[error("bad checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Format(#[from] FormatError),
}
