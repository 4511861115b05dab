//! `mailscreen`: corpus ingestion, feature extraction, feature selection,
//! the cross-validated comparison grid, and single-model train/score.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Bad flags, bad config values and the like. Exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "mailscreen",
    version,
    about = "Flag suspicious emails from keyword and context-indicator features"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a manifest (or generate the synthetic corpus), print its class
    /// balance and optionally write it back as a self-contained manifest.
    Ingest(CommonArgs),
    /// Extract lexicon features and write them as ARFF.
    Features {
        #[command(flatten)]
        common: CommonArgs,
        /// Output ARFF path (defaults to --out).
        #[arg(long)]
        arff: Option<PathBuf>,
    },
    /// Run one selection scheme and list the chosen attributes.
    Select {
        #[command(flatten)]
        common: CommonArgs,
        /// Read features from this ARFF file instead of a corpus.
        #[arg(long)]
        arff: Option<PathBuf>,
    },
    /// Cross-validate every classifier under every selection scheme.
    Grid(CommonArgs),
    /// Train one classifier on the whole corpus and save it.
    Train {
        #[command(flatten)]
        common: CommonArgs,
        /// Where to write the model (defaults to --out, then model.txt).
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Classify one email file with a saved model.
    Score {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        email: PathBuf,
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Re-render a grid CSV.
    Report {
        /// CSV written by `grid`.
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct CommonArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Manifest of labeled emails. Without it the synthetic corpus is used.
    #[arg(long, visible_alias = "manifest")]
    corpus: Option<PathBuf>,
    /// Lexicon file; the bundled one is used otherwise.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Seed for the synthetic corpus and the fold assignment.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of cross-validation folds.
    #[arg(long)]
    k: Option<usize>,
    /// Scheme mnemonic or number; repeat or comma-separate.
    #[arg(long)]
    scheme: Vec<String>,
    /// Classifier tag; repeat or comma-separate.
    #[arg(long)]
    classifier: Vec<String>,
    /// Rerun feature selection inside every training fold.
    #[arg(long)]
    in_fold_selection: bool,
    /// Deal folds without regard to class.
    #[arg(long)]
    unstratified: bool,
    /// markdown or csv.
    #[arg(long)]
    format: Option<String>,
    /// Output file, or the report directory for `grid`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Synthetic corpus size.
    #[arg(long)]
    n: Option<usize>,
    /// Synthetic fraction of Yes emails.
    #[arg(long)]
    ratio: Option<f64>,
    /// Extra random lexicon or filler words in each synthetic email.
    #[arg(long)]
    noise_terms: Option<usize>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let usage = err.chain().any(|e| {
        e.downcast_ref::<UsageError>().is_some()
            || matches!(
                e.downcast_ref::<mailscreen::Error>(),
                Some(mailscreen::Error::InvalidParameter(_))
            )
    });
    if usage {
        EXIT_USAGE
    } else {
        EXIT_DATA
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let mut stdout = std::io::stdout().lock();
    match commands::run(cli.command, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
