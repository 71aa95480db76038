//! Batch pipeline for acoustic aggression analysis: extract features
//! from an annotated speech corpus, run the correlate statistics, train
//! and evaluate the SVM classifier, and run the feature ablation.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{CliError, Context};
use config::PipelineConfig;

#[derive(Parser)]
#[command(name = "aggrospeech", version, about = "Acoustic aggression analysis pipeline")]
struct Cli {
    /// Pipeline config TOML; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the split/training seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Language filter: hi, en, or all.
    #[arg(long, global = true)]
    language: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results are identical for any value.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Skip unreadable corpus files instead of aborting.
    #[arg(long, global = true)]
    continue_on_error: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the corpus and write the per-segment feature store.
    Extract,
    /// ANOVA + Tukey correlate report over the study features.
    Stats {
        /// Feature store directory (defaults to the output directory).
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Grid-search and train the classifier; writes model.json.
    Train {
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Score the trained model on the held-out test split.
    Evaluate {
        #[arg(long)]
        store: Option<PathBuf>,
        /// Model file (defaults to <out>/model.json).
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Cumulative feature-group ablation table.
    Ablate {
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Schema-check the output files in a directory.
    Validate {
        /// Directory to check (defaults to the output directory).
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    /// Classification report from a stored confusion matrix.
    Report {
        /// JSON file holding the confusion matrix.
        #[arg(long)]
        confusion: PathBuf,
    },
}

fn build_context(cli: &Cli) -> Result<Context, CliError> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path).map_err(|e| CliError::Usage(e.to_string()))?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.split.seed = seed;
    }
    if let Some(language) = &cli.language {
        config.corpus.language = language.clone();
    }
    if let Some(out) = &cli.out {
        config.output.dir = out.clone();
    }
    let language = config
        .language_filter()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Context {
        out_dir: config.output.dir.clone(),
        language,
        continue_on_error: cli.continue_on_error,
        config,
    })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure worker pool: {e}")))?;
    }
    let ctx = build_context(cli)?;
    match &cli.command {
        Command::Extract => commands::extract::run(&ctx),
        Command::Stats { store } => commands::stats::run(&ctx, store),
        Command::Train { store } => commands::train::run(&ctx, store),
        Command::Evaluate { store, model } => commands::evaluate::run(&ctx, store, model),
        Command::Ablate { store } => commands::ablate::run(&ctx, store),
        Command::Validate { dir } => commands::validate::run(&ctx, dir),
        Command::Report { confusion } => commands::report::run(&ctx, confusion),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(&cli) {
        log::error!("{}", e.message());
        std::process::exit(e.exit_code());
    }
}
