//! `dga` — train, evaluate and run the transformer fault-diagnosis pipeline.
//!
//! Exit codes: 0 success, 2 input/format error, 3 data-shape/stratification
//! error. Reports go to stdout, diagnostics (including the single timing
//! line) to stderr.

pub mod commands;
pub mod config;
pub mod model;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::RunConfig;

/// Command error carrying its exit code category.
#[derive(Debug)]
pub enum CliError {
    /// Malformed input, files or flags: exit code 2.
    Input(String),
    /// Data-shape/stratification problems: exit code 3.
    Shape(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> CliError {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Shape(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Shape(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<dga_core::Error> for CliError {
    fn from(e: dga_core::Error) -> CliError {
        if e.is_data_shape() {
            CliError::Shape(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(
    name = "dga",
    version,
    about = "Dissolved-gas fault diagnosis for power transformers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonOpts {
    /// Seed for every randomized step.
    #[arg(long)]
    seed: Option<u64>,
    /// Flat key = value config file (flags override it).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic corpus directory.
    Synth {
        /// Output corpus directory.
        #[arg(long)]
        out: PathBuf,
        /// Records per operating mode.
        #[arg(long = "per-class")]
        per_class: usize,
        /// Series length per record.
        #[arg(long, default_value_t = 420)]
        length: usize,
        /// Overwrite an existing non-empty directory.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Write the raw 32-column feature CSV of a corpus.
    Featurize {
        /// Corpus directory.
        #[arg(long)]
        corpus: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a corpus, fit the stacked ensemble and report held-out metrics.
    Train {
        /// Corpus directory.
        #[arg(long)]
        corpus: PathBuf,
        /// Where to write the fitted model.
        #[arg(long = "model-out")]
        model_out: PathBuf,
        /// Held-out fraction per class.
        #[arg(long = "test-fraction")]
        test_fraction: Option<f64>,
        /// Folds for out-of-fold meta-features.
        #[arg(long)]
        folds: Option<usize>,
        /// Correlation threshold for feature pruning.
        #[arg(long)]
        threshold: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Evaluate a model against a labeled corpus.
    Evaluate {
        /// Model file.
        #[arg(long)]
        model: PathBuf,
        /// Labeled corpus directory.
        #[arg(long)]
        corpus: PathBuf,
        /// Optional machine-readable key = value metrics file.
        #[arg(long = "metrics-out")]
        metrics_out: Option<PathBuf>,
    },
    /// Predict modes for a corpus directory or a single record CSV.
    Predict {
        /// Model file.
        #[arg(long)]
        model: PathBuf,
        /// Corpus directory or record CSV.
        #[arg(long)]
        input: PathBuf,
    },
    /// Stratified k-fold cross-validation of one learner.
    Cv {
        /// Corpus directory.
        #[arg(long)]
        corpus: PathBuf,
        /// One of: logreg, tree, forest, gbt, mlp, stack.
        #[arg(long)]
        learner: String,
        /// Fold count.
        #[arg(long)]
        folds: Option<usize>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn resolve_config(
    common: &CommonOpts,
    test_fraction: Option<f64>,
    folds: Option<usize>,
    threshold: Option<f64>,
) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(f) = test_fraction {
        cfg.test_fraction = f;
    }
    if let Some(k) = folds {
        cfg.folds = k;
    }
    if let Some(t) = threshold {
        cfg.threshold = t;
    }
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synth {
            out,
            per_class,
            length,
            force,
            common,
        } => {
            let cfg = resolve_config(&common, None, None, None)?;
            commands::cmd_synth(&out, per_class, length, force, &cfg)
        }
        Command::Featurize { corpus, out } => commands::cmd_featurize(&corpus, &out),
        Command::Train {
            corpus,
            model_out,
            test_fraction,
            folds,
            threshold,
            common,
        } => {
            let cfg = resolve_config(&common, test_fraction, folds, threshold)?;
            commands::cmd_train(&corpus, &model_out, &cfg)
        }
        Command::Evaluate {
            model,
            corpus,
            metrics_out,
        } => commands::cmd_evaluate(&model, &corpus, metrics_out.as_deref()),
        Command::Predict { model, input } => commands::cmd_predict(&model, &input),
        Command::Cv {
            corpus,
            learner,
            folds,
            common,
        } => {
            let cfg = resolve_config(&common, None, folds, None)?;
            commands::cmd_cv(&corpus, &learner, &cfg)
        }
    }
}

/// Parses arguments, runs the command, returns the process exit code.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
