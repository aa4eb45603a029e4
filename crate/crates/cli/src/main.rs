//! `lingaudit`: ingest corpora, audit them, compare reports, validate annotation files.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "lingaudit", version, about = "Diversity audits for instruction corpora")]
#[command(after_help = "Environment:\n  LINGAUDIT_THREADS  maximum worker threads (default: all cores)\n  RUST_LOG           log filter, e.g. info\n\nExit codes: 0 success, 2 input or usage error, 3 required annotation missing.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalize a raw JSONL corpus and write the cleaned records.
    Ingest(IngestArgs),
    /// Audit one corpus and write report.json, report.md and plot-data CSVs.
    Audit(AuditArgs),
    /// Merge two or more report.json files into cross-dataset tables.
    Compare(CompareArgs),
    /// Check annotation files against the corpus with the strict parsers.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Raw corpus, one {"id", "text", "dataset"?} object per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Normalization profile: "default" or "scout".
    #[arg(long, default_value = "default")]
    pub cleaner: String,
    /// Dataset id for every record (default: the "dataset" field, then the file stem).
    #[arg(long)]
    pub dataset: Option<String>,
    /// Split records into sentences on '.', '?' and '!' before cleaning.
    #[arg(long)]
    pub split_sentences: bool,
    /// Filler word list for the scout cleaner, one word per line.
    #[arg(long)]
    pub fillers: Option<PathBuf>,
    /// Output JSONL path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Default)]
pub struct AnnotationArgs {
    /// CoNLL-U parses with `# sent_id = <record id>` per block.
    #[arg(long)]
    pub conllu: Option<PathBuf>,
    /// Constituency trees, one {"id", "ptb"} object per line.
    #[arg(long)]
    pub trees: Option<PathBuf>,
    /// ICEM sentence embeddings; repeat for several encoders.
    #[arg(long)]
    pub embeddings: Vec<PathBuf>,
    /// JSONL row index for each --embeddings file, in the same order.
    #[arg(long = "emb-index")]
    pub emb_index: Vec<PathBuf>,
    /// ICTE token embeddings.
    #[arg(long = "token-embeddings")]
    pub token_embeddings: Option<PathBuf>,
    /// Gold structure labels, one {"id", "negation", "conditional", "multi_step", "cycle"} object per line.
    #[arg(long)]
    pub gold: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct AuditArgs {
    /// Corpus JSONL (raw or already ingested).
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub annotations: AnnotationArgs,
    /// TOML configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Normalization profile applied while reading the corpus.
    #[arg(long)]
    pub cleaner: Option<String>,
    /// Dataset id override.
    #[arg(long)]
    pub dataset: Option<String>,
    /// Sampling seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Records drawn per trial for pairwise metrics.
    #[arg(long)]
    pub sample_size: Option<usize>,
    /// Number of sampling trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Subset-tree kernel decay, in (0, 1].
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Sample pairwise metrics from unique sentences only.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub pairwise_on_unique: Option<bool>,
    /// Run PCA on all rows instead of unique-sentence rows.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub pca_on_all: Option<bool>,
    /// Comma-separated sections or annotation kinds that must be computed
    /// (a1, a2, a3, conllu, trees, embeddings, token_embeddings, gold); exit 3 otherwise.
    #[arg(long, value_delimiter = ',')]
    pub require: Vec<String>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Two or more report.json files.
    #[arg(num_args = 1.., required = true)]
    pub reports: Vec<PathBuf>,
    /// Output directory for comparison.md, comparison.csv and matrix CSVs.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Corpus JSONL the annotation ids must refer to.
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub annotations: AnnotationArgs,
    /// Normalization profile applied while reading the corpus.
    #[arg(long, default_value = "default")]
    pub cleaner: String,
    /// Also write the validation report to this path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    MissingAnnotation(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

fn init_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("LINGAUDIT_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Input(anyhow::anyhow!("LINGAUDIT_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| match cli.command {
        Command::Ingest(a) => commands::ingest(&a),
        Command::Audit(a) => commands::audit(&a),
        Command::Compare(a) => commands::compare(&a),
        Command::Validate(a) => commands::validate(&a),
    });
    match result {
        Ok(code) => code,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::MissingAnnotation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
