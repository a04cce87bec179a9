//! `tagparse`: encode treebanks as label sequences, train and run the
//! linear probe, decode predictions back into trees and score them.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use tagparse::io::PosColumn;
use tagparse::{Execution, Formalism};

#[derive(Parser, Debug)]
#[command(
    name = "tagparse",
    version,
    about = "Constituent and dependency parsing as sequence labeling"
)]
struct Cli {
    /// Worker threads for per-sentence work; 1 runs sequentially.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Turn a treebank into a `form<TAB>label` file.
    Encode(EncodeArgs),
    /// Turn a label file back into a treebank, repairing as needed.
    Decode(DecodeArgs),
    /// Train the probe on a label file.
    Train(TrainArgs),
    /// Label the tokens of a file with a trained probe.
    Predict(PredictArgs),
    /// Score a predicted treebank against the gold one.
    Eval(EvalArgs),
    /// Per-bucket breakdowns of a predicted treebank as TSV.
    Analyze(EvalArgs),
}

#[derive(Args, Debug)]
struct EncodeArgs {
    /// Treebank: bracketed trees for const, CoNLL-U for dep.
    input: PathBuf,
    #[arg(long)]
    formalism: Formalism,
    #[arg(short, long)]
    output: PathBuf,
    /// Also write `form<TAB>tag`, the tag source `decode` needs.
    #[arg(long)]
    tags_out: Option<PathBuf>,
    #[arg(long, default_value = "upos")]
    pos_column: PosColumn,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    /// Label file (`form<TAB>label`).
    input: PathBuf,
    #[arg(long)]
    formalism: Formalism,
    #[arg(short, long)]
    output: PathBuf,
    /// `form<TAB>tag` file aligned with the labels.
    #[arg(long, conflicts_with = "treebank", required_unless_present = "treebank")]
    tags: Option<PathBuf>,
    /// Treebank in the formalism's format to take the tags from.
    #[arg(long)]
    treebank: Option<PathBuf>,
    #[arg(long, default_value = "upos")]
    pos_column: PosColumn,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Training label file.
    train: PathBuf,
    /// Development label file used to pick the best epoch.
    #[arg(long)]
    dev: Option<PathBuf>,
    /// Where to write the model; `.config` and `.log.tsv` files go beside it.
    #[arg(short, long)]
    output: PathBuf,
    /// `random:D`, `vectors:PATH` or the path of a text embedding table.
    #[arg(long, default_value = "random:300")]
    embeddings: EmbeddingSpec,
    /// Token vectors for the dev file when training on `vectors:`.
    #[arg(long)]
    dev_embeddings: Option<EmbeddingSpec>,
    #[arg(long)]
    formalism: Option<Formalism>,
    /// Keep the input vectors fixed (default).
    #[arg(long, conflicts_with = "fine_tune")]
    freeze: bool,
    /// Update the input vectors along with the probe.
    #[arg(long)]
    fine_tune: bool,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// `key=value` training configuration; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PredictArgs {
    /// Token file; a label column, if present, is ignored.
    input: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Required unless the model carries its own table; a table given here
    /// is overlaid by the stored one.
    #[arg(long)]
    embeddings: Option<EmbeddingSpec>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    gold: PathBuf,
    predicted: PathBuf,
    #[arg(long)]
    formalism: Formalism,
    /// evalb-style parameter file (const only); replaces the defaults.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Leave out `punct` tokens (dep only).
    #[arg(long)]
    skip_punct: bool,
    #[arg(long, default_value = "upos")]
    pos_column: PosColumn,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Embedding source as written on the command line.
#[derive(Clone, Debug, PartialEq)]
enum EmbeddingSpec {
    Random(usize),
    Table(PathBuf),
    Vectors(PathBuf),
}

impl FromStr for EmbeddingSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(d) = s.strip_prefix("random:") {
            match d.parse::<usize>() {
                Ok(d) if d >= 1 => Ok(EmbeddingSpec::Random(d)),
                _ => Err(format!("bad dimension in {:?}", s)),
            }
        } else if let Some(p) = s.strip_prefix("vectors:") {
            if p.is_empty() {
                return Err("vectors: needs a path".into());
            }
            Ok(EmbeddingSpec::Vectors(p.into()))
        } else if s.is_empty() {
            Err("empty embedding spec".into())
        } else {
            Ok(EmbeddingSpec::Table(s.into()))
        }
    }
}

fn execution(jobs: Option<usize>) -> Result<Execution> {
    match jobs {
        Some(0) => bail!("--jobs must be at least 1"),
        Some(1) => Ok(Execution::Sequential),
        Some(_n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new()
                .num_threads(_n)
                .build_global()
                .context("configuring the thread pool")?;
            Ok(Execution::default())
        }
        None => Ok(Execution::default()),
    }
}

fn run(cli: Cli) -> Result<()> {
    let exec = execution(cli.jobs)?;
    match cli.command {
        Command::Encode(a) => commands::encode(&a).context("encode"),
        Command::Decode(a) => commands::decode(&a, exec).context("decode"),
        Command::Train(a) => commands::train(&a, exec).context("train"),
        Command::Predict(a) => commands::predict(&a, exec).context("predict"),
        Command::Eval(a) => commands::eval(&a, exec, false).context("eval"),
        Command::Analyze(a) => commands::eval(&a, exec, true).context("analyze"),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::FAILURE
        }
    }
}
