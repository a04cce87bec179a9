use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::embed::{resolve, token_inputs, Input};
use super::{fallback_label, EmbeddingSource, LabelVocab, LinearProbe, Mode, TaggerError};
use crate::io::{EmbeddingTable, LabeledSentence};
use crate::parallel::Execution;
use crate::Formalism;

/// Where the training vectors come from; echoed into the config file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SourceKind {
    #[default]
    Random,
    Table,
    Vectors,
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceKind::Random => "random",
            SourceKind::Table => "table",
            SourceKind::Vectors => "vectors",
        })
    }
}

impl FromStr for SourceKind {
    type Err = TaggerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(SourceKind::Random),
            "table" => Ok(SourceKind::Table),
            "vectors" => Ok(SourceKind::Vectors),
            other => Err(TaggerError::InvalidConfig(format!(
                "unknown embedding source {:?}",
                other
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub formalism: Formalism,
    pub learning_rate: f64,
    pub epochs: usize,
    /// Sentences per minibatch.
    pub batch_size: usize,
    pub seed: u64,
    pub mode: Mode,
    pub source: SourceKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            formalism: Formalism::Constituent,
            learning_rate: 5e-4,
            epochs: 30,
            batch_size: 32,
            seed: 1,
            mode: Mode::Frozen,
            source: SourceKind::Random,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TaggerError> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(TaggerError::InvalidConfig("learning_rate must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(TaggerError::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(TaggerError::InvalidConfig("batch_size must be at least 1".into()));
        }
        if self.mode == Mode::FineTune && self.source == SourceKind::Vectors {
            return Err(TaggerError::InvalidConfig(
                "precomputed token vectors cannot be fine-tuned".into(),
            ));
        }
        Ok(())
    }

    /// `key=value` lines, readable by [`TrainConfig::from_key_values`].
    pub fn to_key_values(&self) -> String {
        format!(
            "formalism={}\nlearning_rate={}\nepochs={}\nbatch_size={}\nseed={}\nmode={}\nsource={}\n",
            self.formalism,
            self.learning_rate,
            self.epochs,
            self.batch_size,
            self.seed,
            match self.mode {
                Mode::Frozen => "frozen",
                Mode::FineTune => "fine-tune",
            },
            self.source
        )
    }

    /// Starts from `self` and overrides every key present in `text`.
    /// Blank lines and `#` comments are skipped.
    pub fn merge_key_values(mut self, text: &str) -> Result<Self, TaggerError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| TaggerError::InvalidConfig(format!("line {}: {}", i + 1, msg));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "formalism" => self.formalism = value.parse().map_err(|e: String| bad(&e))?,
                "learning_rate" => self.learning_rate = value.parse().map_err(|_| bad("bad learning_rate"))?,
                "epochs" => self.epochs = value.parse().map_err(|_| bad("bad epochs"))?,
                "batch_size" => self.batch_size = value.parse().map_err(|_| bad("bad batch_size"))?,
                "seed" => self.seed = value.parse().map_err(|_| bad("bad seed"))?,
                "mode" => {
                    self.mode = match value {
                        "frozen" | "freeze" => Mode::Frozen,
                        "fine-tune" | "finetune" => Mode::FineTune,
                        _ => return Err(bad("mode must be frozen or fine-tune")),
                    }
                }
                "source" => self.source = value.parse()?,
                other => return Err(bad(&format!("unknown key {:?}", other))),
            }
        }
        Ok(self)
    }

    pub fn from_key_values(text: &str) -> Result<Self, TaggerError> {
        TrainConfig::default().merge_key_values(text)
    }
}

/// Labeled sentences together with the vectors that feed them. Sentence `i`
/// of a token-vector source must line up with `sentences[i]`.
#[derive(Clone, Copy, Debug)]
pub struct Corpus<'a> {
    pub sentences: &'a [LabeledSentence],
    pub source: EmbeddingSource<'a>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    /// Summed loss over the epoch's batches, each measured before its update.
    pub train_loss: f64,
    pub dev_accuracy: Option<f64>,
}

/// Tab-separated per-epoch rows with a header.
pub fn epoch_log_tsv(log: &[EpochLog]) -> String {
    let mut out = String::from("epoch\ttrain_loss\tdev_accuracy\n");
    for e in log {
        let dev = e
            .dev_accuracy
            .map(|a| format!("{:.4}", a))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(out, "{}\t{:.6}\t{}", e.epoch, e.train_loss, dev);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    pub probe: LinearProbe,
    pub vocab: LabelVocab,
    /// The updated table in fine-tune mode.
    pub embeddings: Option<EmbeddingTable>,
    pub log: Vec<EpochLog>,
}

impl TrainedModel {
    /// Labels for `sentences`, using the fine-tuned table when there is one.
    pub fn predict(
        &self,
        sentences: &[LabeledSentence],
        source: EmbeddingSource<'_>,
        execution: Execution,
    ) -> Result<Vec<Vec<String>>, TaggerError> {
        let source = match &self.embeddings {
            Some(table) => EmbeddingSource::Table(table),
            None => source,
        };
        predict(&self.probe, &self.vocab, sentences, source, execution)
    }
}

/// Argmax label per token; boundary positions are not part of the output.
pub fn predict(
    probe: &LinearProbe,
    vocab: &LabelVocab,
    sentences: &[LabeledSentence],
    source: EmbeddingSource<'_>,
    execution: Execution,
) -> Result<Vec<Vec<String>>, TaggerError> {
    if source.dim() != probe.dim() {
        return Err(TaggerError::DimensionMismatch {
            expected: probe.dim(),
            found: source.dim(),
        });
    }
    let indices: Vec<usize> = (0..sentences.len()).collect();
    execution
        .map(&indices, |&i| {
            token_inputs(source, i, &sentences[i].forms)?
                .into_iter()
                .map(|input| Ok(vocab.label(probe.predict(resolve(source, input))?).to_owned()))
                .collect()
        })
        .into_iter()
        .collect()
}

struct Example {
    inputs: Vec<Input>,
    classes: Vec<usize>,
}

fn examples(corpus: Corpus<'_>, vocab: &LabelVocab) -> Result<Vec<Example>, TaggerError> {
    corpus
        .sentences
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Ok(Example {
                inputs: token_inputs(corpus.source, i, &s.forms)?,
                classes: s.labels.iter().map(|l| vocab.class(l)).collect(),
            })
        })
        .collect()
}

fn accuracy(
    probe: &LinearProbe,
    vocab: &LabelVocab,
    corpus: Corpus<'_>,
    table: Option<&EmbeddingTable>,
    execution: Execution,
) -> Result<f64, TaggerError> {
    let source = match (table, corpus.source) {
        (Some(t), EmbeddingSource::Table(_)) => EmbeddingSource::Table(t),
        _ => corpus.source,
    };
    let predicted = predict(probe, vocab, corpus.sentences, source, execution)?;
    let (mut right, mut total) = (0usize, 0usize);
    for (gold, pred) in corpus.sentences.iter().zip(&predicted) {
        total += gold.labels.len();
        right += gold.labels.iter().zip(pred).filter(|(g, p)| g == p).count();
    }
    Ok(if total == 0 { 0.0 } else { right as f64 / total as f64 })
}

/// Trains the probe by minibatch SGD on the summed negative log-likelihood.
///
/// Sentences are shuffled each epoch by a generator seeded from
/// `config.seed`. With a dev corpus the parameters of the epoch with the
/// best dev accuracy are returned (earliest wins ties), otherwise those of
/// the last epoch. In fine-tune mode the source table is cloned and the
/// clone's rows are updated alongside the layer; in frozen mode the source
/// is only read.
pub fn train(
    corpus: Corpus<'_>,
    dev: Option<Corpus<'_>>,
    config: &TrainConfig,
    execution: Execution,
) -> Result<TrainedModel, TaggerError> {
    config.validate()?;
    let base_table = match (config.mode, corpus.source) {
        (Mode::FineTune, EmbeddingSource::Table(t)) => Some(t),
        (Mode::FineTune, EmbeddingSource::Vectors(_)) => {
            return Err(TaggerError::InvalidConfig(
                "precomputed token vectors cannot be fine-tuned".into(),
            ))
        }
        (Mode::Frozen, _) => None,
    };
    if let Some(dev) = dev {
        if dev.source.dim() != corpus.source.dim() {
            return Err(TaggerError::DimensionMismatch {
                expected: corpus.source.dim(),
                found: dev.source.dim(),
            });
        }
    }
    for (i, s) in corpus.sentences.iter().enumerate() {
        if s.forms.len() != s.labels.len() {
            return Err(TaggerError::Alignment {
                sentence: i,
                message: format!("{} forms but {} labels", s.forms.len(), s.labels.len()),
            });
        }
    }

    let all_labels = || {
        corpus
            .sentences
            .iter()
            .flat_map(|s| s.labels.iter().map(String::as_str))
    };
    if all_labels().next().is_none() {
        return Err(TaggerError::EmptyCorpus);
    }
    let vocab = LabelVocab::from_labels(all_labels(), fallback_label(config.formalism, all_labels()));
    let data = examples(corpus, &vocab)?;
    let dim = corpus.source.dim();

    let mut probe = LinearProbe::zeros(vocab.len(), dim);
    let mut table = base_table.cloned();
    let mut best: Option<(f64, LinearProbe, Option<EmbeddingTable>)> = None;
    let mut log = Vec::with_capacity(config.epochs);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let mut rows = Vec::new();
            let mut xs: Vec<Vec<f64>> = Vec::new();
            let mut ys = Vec::new();
            {
                let source = match &table {
                    Some(t) => EmbeddingSource::Table(t),
                    None => corpus.source,
                };
                for &i in batch {
                    for (&input, &y) in data[i].inputs.iter().zip(&data[i].classes) {
                        xs.push(resolve(source, input).to_vec());
                        ys.push(y);
                        if let Input::Row(r) = input {
                            rows.push(r);
                        }
                    }
                }
            }
            if xs.is_empty() {
                continue;
            }
            let items: Vec<(&[f64], usize)> = xs.iter().map(Vec::as_slice).zip(ys.iter().copied()).collect();
            let grads = probe.loss_and_gradients(&items, config.mode, execution)?;
            epoch_loss += grads.loss;
            probe.apply(&grads, config.learning_rate);
            if let (Some(t), Some(input_grads)) = (table.as_mut(), grads.inputs.as_ref()) {
                for (&row, g) in rows.iter().zip(input_grads) {
                    for (v, gi) in t.row_mut(row).iter_mut().zip(g) {
                        *v -= config.learning_rate * gi;
                    }
                }
            }
        }

        let dev_accuracy = match dev {
            Some(d) => Some(accuracy(&probe, &vocab, d, table.as_ref(), execution)?),
            None => None,
        };
        log.push(EpochLog {
            epoch,
            train_loss: epoch_loss,
            dev_accuracy,
        });
        if let Some(acc) = dev_accuracy {
            if best.as_ref().is_none_or(|(b, _, _)| acc > *b) {
                best = Some((acc, probe.clone(), table.clone()));
            }
        }
    }

    let (probe, embeddings) = match best {
        Some((_, p, t)) => (p, t),
        None => (probe, table),
    };
    Ok(TrainedModel {
        probe,
        vocab,
        embeddings,
        log,
    })
}
