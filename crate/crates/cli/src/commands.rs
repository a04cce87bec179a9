use std::collections::HashSet;
use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use tagparse::const_codec::{decode_const_with_repairs, encode_const, parse_labels_lenient, ConstRepairs};
use tagparse::dep_codec::{decode_dep_lenient, encode_dep, DepRepairs};
use tagparse::io::{
    read_bracketed, read_conllu, read_embeddings_filtered, read_labels, read_token_vectors, write_bracketed,
    write_conllu_corpus, write_labels, EmbeddingTable, LabeledSentence, TokenVectorFile,
};
use tagparse::metrics::{
    attachment_report, attachment_score, attachment_tsv, bracket_report, bracket_tsv, bracketing_score,
    AttachmentOptions, EvalParams,
};
use tagparse::tagger::{
    self, add_boundary_rows, epoch_log_tsv, init_random_embeddings, load_model, Corpus, EmbeddingSource, Mode,
    SourceKind, TrainConfig,
};
use tagparse::{Execution, Formalism};

use crate::{DecodeArgs, EmbeddingSpec, EncodeArgs, EvalArgs, PredictArgs, TrainArgs};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run leaves no partial output.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.persist(path)
        .map_err(|e| e.error)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// `path` with `suffix` appended to its file name.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

fn labeled(forms: Vec<&str>, labels: Vec<String>) -> LabeledSentence {
    LabeledSentence {
        forms: forms.into_iter().map(str::to_owned).collect(),
        labels,
    }
}

pub fn encode(args: &EncodeArgs) -> Result<()> {
    let text = read_text(&args.input)?;
    let ctx = || format!("parsing {}", args.input.display());
    let (labels, tags): (Vec<LabeledSentence>, Vec<LabeledSentence>) = match args.formalism {
        Formalism::Constituent => {
            let trees = read_bracketed(&text).with_context(ctx)?;
            trees
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let labels = encode_const(t).with_context(|| format!("sentence {}", i + 1))?;
                    let tags = t.tags().into_iter().map(str::to_owned).collect();
                    Ok((
                        labeled(t.words(), labels.iter().map(ToString::to_string).collect()),
                        labeled(t.words(), tags),
                    ))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip()
        }
        Formalism::Dependency => {
            let sentences = read_conllu(&text, args.pos_column).with_context(ctx)?;
            sentences
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let labels = encode_dep(s).with_context(|| format!("sentence {}", i + 1))?;
                    let tags = s.tags().into_iter().map(str::to_owned).collect();
                    Ok((
                        labeled(s.forms(), labels.iter().map(ToString::to_string).collect()),
                        labeled(s.forms(), tags),
                    ))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .unzip()
        }
    };
    write_atomic(&args.output, write_labels(&labels).as_bytes())?;
    if let Some(path) = &args.tags_out {
        write_atomic(path, write_labels(&tags).as_bytes())?;
    }
    Ok(())
}

/// Tags aligned with `labels`, from a `form<TAB>tag` file or a treebank.
fn tag_source(args: &DecodeArgs, labels: &[LabeledSentence]) -> Result<Vec<Vec<String>>> {
    let tags: Vec<Vec<String>> = match (&args.tags, &args.treebank) {
        (Some(path), _) => read_labels(&read_text(path)?)
            .with_context(|| format!("parsing {}", path.display()))?
            .into_iter()
            .map(|s| s.labels)
            .collect(),
        (None, Some(path)) => {
            let text = read_text(path)?;
            let ctx = || format!("parsing {}", path.display());
            match args.formalism {
                Formalism::Constituent => read_bracketed(&text)
                    .with_context(ctx)?
                    .iter()
                    .map(|t| t.tags().into_iter().map(str::to_owned).collect())
                    .collect(),
                Formalism::Dependency => read_conllu(&text, args.pos_column)
                    .with_context(ctx)?
                    .iter()
                    .map(|s| s.tags().into_iter().map(str::to_owned).collect())
                    .collect(),
            }
        }
        (None, None) => bail!("decode needs --tags or --treebank"),
    };
    if tags.len() != labels.len() {
        bail!(
            "label file has {} sentences, tag source has {}",
            labels.len(),
            tags.len()
        );
    }
    for (i, (l, t)) in labels.iter().zip(&tags).enumerate() {
        if l.len() != t.len() {
            bail!("sentence {}: {} labels but {} tags", i + 1, l.len(), t.len());
        }
    }
    Ok(tags)
}

pub fn decode(args: &DecodeArgs, exec: Execution) -> Result<()> {
    let labels = read_labels(&read_text(&args.input)?).with_context(|| format!("parsing {}", args.input.display()))?;
    let tags = tag_source(args, &labels)?;
    let pairs: Vec<(&LabeledSentence, &Vec<String>)> = labels.iter().zip(&tags).collect();

    let output = match args.formalism {
        Formalism::Constituent => {
            let decoded = exec.map(&pairs, |(s, t)| {
                let (parsed, malformed) = parse_labels_lenient(&s.labels);
                let words: Vec<&str> = s.forms.iter().map(String::as_str).collect();
                let tags: Vec<&str> = t.iter().map(String::as_str).collect();
                decode_const_with_repairs(&parsed, &words, &tags).map(|(tree, r)| (tree, r, malformed))
            });
            let mut out = String::new();
            let mut repairs = ConstRepairs::default();
            let mut malformed = 0;
            for (i, d) in decoded.into_iter().enumerate() {
                let (tree, r, m) = d.with_context(|| format!("sentence {}", i + 1))?;
                repairs += r;
                malformed += m;
                out.push_str(&write_bracketed(&tree));
                out.push('\n');
            }
            eprintln!(
                "repairs: conflicting_nonterminals={} empty_levels={} clamped_depths={} relabeled_roots={} malformed_labels={}",
                repairs.conflicting_nonterminals, repairs.empty_levels, repairs.clamped_depths, repairs.relabeled_roots, malformed
            );
            out
        }
        Formalism::Dependency => {
            let decoded = exec.map(&pairs, |(s, t)| {
                let words: Vec<&str> = s.forms.iter().map(String::as_str).collect();
                let tags: Vec<&str> = t.iter().map(String::as_str).collect();
                decode_dep_lenient(&s.labels, &words, &tags)
            });
            let mut sentences = Vec::with_capacity(decoded.len());
            let mut repairs = DepRepairs::default();
            let mut malformed = 0;
            for (i, d) in decoded.into_iter().enumerate() {
                let (s, r, m) = d.with_context(|| format!("sentence {}", i + 1))?;
                repairs += r;
                malformed += m;
                sentences.push(s);
            }
            eprintln!(
                "repairs: missing_root={} extra_roots={} invalid_heads={} cycles_broken={} malformed_labels={}",
                repairs.missing_root, repairs.extra_roots, repairs.invalid_heads, repairs.cycles_broken, malformed
            );
            write_conllu_corpus(&sentences, args.pos_column)
        }
    };
    write_atomic(&args.output, output.as_bytes())
}

/// Forms plus their lowercase variants, the keys a table lookup may try.
fn lookup_keys<'a>(corpora: impl IntoIterator<Item = &'a [LabeledSentence]>) -> HashSet<String> {
    let mut words = HashSet::new();
    for corpus in corpora {
        for form in corpus.iter().flat_map(|s| &s.forms) {
            words.insert(form.to_lowercase());
            words.insert(form.clone());
        }
    }
    words.insert(tagger::BOS.to_owned());
    words.insert(tagger::EOS.to_owned());
    words
}

fn load_table(path: &Path, keys: &HashSet<String>, seed: u64) -> Result<EmbeddingTable> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut table = read_embeddings_filtered(BufReader::new(file), Some(keys))
        .with_context(|| format!("parsing {}", path.display()))?;
    add_boundary_rows(&mut table, seed);
    Ok(table)
}

fn load_vectors(path: &Path, sentences: &[LabeledSentence]) -> Result<TokenVectorFile> {
    let vectors = read_token_vectors(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let counts: Vec<usize> = sentences.iter().map(LabeledSentence::len).collect();
    vectors
        .check_alignment(&counts)
        .with_context(|| format!("aligning {}", path.display()))?;
    Ok(vectors)
}

fn read_label_file(path: &Path) -> Result<Vec<LabeledSentence>> {
    read_labels(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn train_config(args: &TrainArgs) -> Result<TrainConfig> {
    let mut config = match &args.config {
        Some(path) => {
            TrainConfig::from_key_values(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))?
        }
        None => TrainConfig::default(),
    };
    if let Some(f) = args.formalism {
        config.formalism = f;
    }
    if let Some(lr) = args.learning_rate {
        config.learning_rate = lr;
    }
    if let Some(e) = args.epochs {
        config.epochs = e;
    }
    if let Some(b) = args.batch_size {
        config.batch_size = b;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if args.freeze {
        config.mode = Mode::Frozen;
    }
    if args.fine_tune {
        config.mode = Mode::FineTune;
    }
    config.source = match args.embeddings {
        EmbeddingSpec::Random(_) => SourceKind::Random,
        EmbeddingSpec::Table(_) => SourceKind::Table,
        EmbeddingSpec::Vectors(_) => SourceKind::Vectors,
    };
    config.validate()?;
    Ok(config)
}

pub fn train(args: &TrainArgs, exec: Execution) -> Result<()> {
    let config = train_config(args)?;
    let train_set = read_label_file(&args.train)?;
    let dev_set = args.dev.as_deref().map(read_label_file).transpose()?;

    // Owned storage for whichever sources are in play.
    let mut table = None;
    let mut train_vectors = None;
    let mut dev_vectors = None;
    match &args.embeddings {
        EmbeddingSpec::Random(d) => {
            let words = train_set.iter().flat_map(|s| s.forms.iter().map(String::as_str));
            table = Some(init_random_embeddings(words, *d, config.seed));
        }
        EmbeddingSpec::Table(path) => {
            let keys = lookup_keys(std::iter::once(train_set.as_slice()).chain(dev_set.as_deref()));
            table = Some(load_table(path, &keys, config.seed)?);
        }
        EmbeddingSpec::Vectors(path) => {
            train_vectors = Some(load_vectors(path, &train_set)?);
            if let Some(dev) = &dev_set {
                match &args.dev_embeddings {
                    Some(EmbeddingSpec::Vectors(p)) => dev_vectors = Some(load_vectors(p, dev)?),
                    _ => bail!("--dev with vectors: training needs --dev-embeddings vectors:PATH"),
                }
            }
        }
    }
    let source = match (&table, &train_vectors) {
        (Some(t), _) => EmbeddingSource::Table(t),
        (None, Some(v)) => EmbeddingSource::Vectors(v),
        (None, None) => unreachable!("one source is always loaded"),
    };
    let dev_source = dev_vectors.as_ref().map(EmbeddingSource::Vectors).unwrap_or(source);

    let corpus = Corpus {
        sentences: &train_set,
        source,
    };
    let dev = dev_set.as_deref().map(|sentences| Corpus {
        sentences,
        source: dev_source,
    });
    let model = tagger::train(corpus, dev, &config, exec)?;
    for e in &model.log {
        match e.dev_accuracy {
            Some(a) => eprintln!("epoch {:>3}  loss {:.4}  dev accuracy {:.4}", e.epoch, e.train_loss, a),
            None => eprintln!("epoch {:>3}  loss {:.4}", e.epoch, e.train_loss),
        }
    }

    // Random tables are part of the model; fine-tuned tables replace the
    // original rows; frozen precomputed tables stay in their own file.
    let stored = match (&model.embeddings, config.source) {
        (Some(t), _) => Some(t),
        (None, SourceKind::Random) => table.as_ref(),
        (None, _) => None,
    };
    let mut bytes = Vec::new();
    tagger::write_model(&mut bytes, &model.probe, &model.vocab, stored)?;
    write_atomic(&args.output, &bytes)?;
    write_atomic(&sibling(&args.output, ".config"), config.to_key_values().as_bytes())?;
    write_atomic(&sibling(&args.output, ".log.tsv"), epoch_log_tsv(&model.log).as_bytes())?;
    Ok(())
}

pub fn predict(args: &PredictArgs, exec: Execution) -> Result<()> {
    let (probe, vocab, stored) =
        load_model(&args.model).with_context(|| format!("loading {}", args.model.display()))?;
    let sentences = read_label_file(&args.input)?;

    let mut table = None;
    let mut vectors = None;
    match (stored, &args.embeddings) {
        (Some(t), None) => table = Some(t),
        (Some(t), Some(EmbeddingSpec::Table(path))) => {
            let mut base = load_table(path, &lookup_keys([sentences.as_slice()]), 0)?;
            if base.dim() != t.dim() {
                bail!("{} has dimension {}, the model {}", path.display(), base.dim(), t.dim());
            }
            base.overlay(&t);
            table = Some(base);
        }
        (Some(_), Some(_)) => bail!("this model carries its own table; only a table file can extend it"),
        (None, Some(EmbeddingSpec::Table(path))) => {
            table = Some(load_table(path, &lookup_keys([sentences.as_slice()]), 0)?)
        }
        (None, Some(EmbeddingSpec::Vectors(path))) => vectors = Some(load_vectors(path, &sentences)?),
        (None, Some(EmbeddingSpec::Random(_))) => {
            return Err(anyhow!("random embeddings are stored in the model, which has none"))
        }
        (None, None) => bail!("this model needs --embeddings"),
    }
    let source = match (&table, &vectors) {
        (Some(t), _) => EmbeddingSource::Table(t),
        (None, Some(v)) => EmbeddingSource::Vectors(v),
        (None, None) => unreachable!("one source is always loaded"),
    };
    let labels = tagger::predict(&probe, &vocab, &sentences, source, exec)?;
    let out: Vec<LabeledSentence> = sentences
        .into_iter()
        .zip(labels)
        .map(|(s, labels)| LabeledSentence { forms: s.forms, labels })
        .collect();
    write_atomic(&args.output, write_labels(&out).as_bytes())
}

pub fn eval(args: &EvalArgs, exec: Execution, analyze: bool) -> Result<()> {
    let gold_text = read_text(&args.gold)?;
    let pred_text = read_text(&args.predicted)?;
    let report = match args.formalism {
        Formalism::Constituent => {
            let params = match &args.params {
                Some(p) => EvalParams::parse(&read_text(p)?).with_context(|| format!("parsing {}", p.display()))?,
                None => EvalParams::default(),
            };
            let gold = read_bracketed(&gold_text).with_context(|| format!("parsing {}", args.gold.display()))?;
            let pred = read_bracketed(&pred_text).with_context(|| format!("parsing {}", args.predicted.display()))?;
            let score = bracketing_score(&gold, &pred, &params, exec)?;
            if analyze {
                bracket_tsv(&score)
            } else {
                bracket_report(&score, false)
            }
        }
        Formalism::Dependency => {
            let gold =
                read_conllu(&gold_text, args.pos_column).with_context(|| format!("parsing {}", args.gold.display()))?;
            let pred = read_conllu(&pred_text, args.pos_column)
                .with_context(|| format!("parsing {}", args.predicted.display()))?;
            let options = AttachmentOptions {
                skip_punct: args.skip_punct,
            };
            let score = attachment_score(&gold, &pred, &options, exec)?;
            if analyze {
                attachment_tsv(&score)
            } else {
                attachment_report(&score, false)
            }
        }
    };
    match &args.output {
        Some(path) => write_atomic(path, report.as_bytes()),
        None => {
            print!("{}", report);
            Ok(())
        }
    }
}
