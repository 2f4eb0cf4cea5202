//! `slm`: generate data, train and evaluate SLM/SLR models, run benchmarks.
//!
//! Exit status is 0 on success, 2 for bad usage (unknown flags, bad config,
//! invalid parameters) and 1 for any other failure.

mod bench;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slm::SearchMode;

use config::{ModelKind, RunConfig};

/// Raised for problems the user can fix by changing the invocation.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(name = "slm", version, about = "Oblique decision trees with sparse linear splits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset to CSV.
    Generate(GenerateArgs),
    /// Fit a model and save it as JSON.
    Train(TrainArgs),
    /// Score a saved model on a CSV file.
    Eval(EvalArgs),
    /// Time training across datasets, models, searches and worker counts.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    dataset: String,
    #[arg(short = 'n', long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Flags shared by `train` and `bench`; unset flags fall back to the config.
#[derive(Args)]
struct CommonArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trees: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    test_fraction: Option<f64>,
    #[arg(long)]
    target: Option<String>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig, UsageError> {
        let mut cfg = RunConfig::load(self.config.as_deref())?;
        set(&mut cfg.seed, self.seed);
        set(&mut cfg.trees, self.trees);
        set(&mut cfg.learning_rate, self.learning_rate);
        if self.max_depth.is_some() {
            cfg.max_depth = self.max_depth;
        }
        set(&mut cfg.samples, self.samples);
        set(&mut cfg.noise, self.noise);
        set(&mut cfg.test_fraction, self.test_fraction);
        if self.target.is_some() {
            cfg.target.clone_from(&self.target);
        }
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Synthetic dataset id.
    #[arg(long, conflicts_with = "csv")]
    dataset: Option<String>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    search: Option<SearchMode>,
    /// Worker threads; 0 uses every physical core.
    #[arg(long)]
    workers: Option<usize>,
    /// Model output path [default: model.json].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the held-out rows as CSV.
    #[arg(long)]
    save_test: Option<PathBuf>,
    /// Write the effective configuration as TOML before training.
    #[arg(long)]
    dump_config: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Saved model (JSON).
    model: PathBuf,
    /// CSV file with the same feature columns as the training data.
    data: PathBuf,
    #[arg(long)]
    target: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Synthetic dataset ids.
    #[arg(long = "dataset", value_delimiter = ',')]
    datasets: Vec<String>,
    /// CSV datasets; the task follows the model.
    #[arg(long = "csv", value_delimiter = ',')]
    csvs: Vec<PathBuf>,
    #[arg(long = "model", value_delimiter = ',')]
    models: Vec<ModelKind>,
    #[arg(long = "search", value_delimiter = ',')]
    searches: Vec<SearchMode>,
    #[arg(long = "workers", value_delimiter = ',')]
    workers: Vec<usize>,
    #[arg(long)]
    repetitions: Option<usize>,
    /// Report prefix; writes PREFIX.md and PREFIX.csv [default: bench].
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate(a) => commands::generate(&a.dataset, a.samples, a.noise, a.seed, &a.out),
        Command::Train(a) => {
            let mut cfg = a.common.resolve()?;
            if a.dataset.is_some() || a.csv.is_some() {
                cfg.dataset = a.dataset;
                cfg.csv = a.csv;
            }
            set(&mut cfg.model, a.model);
            set(&mut cfg.search, a.search);
            set(&mut cfg.workers, a.workers);
            if a.out.is_some() {
                cfg.out = a.out;
            }
            if a.save_test.is_some() {
                cfg.test_out = a.save_test;
            }
            if let Some(path) = &a.dump_config {
                std::fs::write(path, cfg.to_toml())?;
            }
            commands::train(&cfg)
        }
        Command::Eval(a) => commands::eval(&a.model, &a.data, a.target.as_deref()),
        Command::Bench(a) => {
            let mut cfg = a.common.resolve()?;
            if !a.datasets.is_empty() || !a.csvs.is_empty() {
                cfg.datasets = a.datasets;
                cfg.csvs = a.csvs;
            }
            if !a.models.is_empty() {
                cfg.models = a.models;
            }
            if !a.searches.is_empty() {
                cfg.searches = a.searches;
            }
            if !a.workers.is_empty() {
                cfg.worker_counts = a.workers;
            }
            set(&mut cfg.repetitions, a.repetitions);
            if a.out.is_some() {
                cfg.out = a.out;
            }
            bench::run(&cfg)
        }
    }
}

fn is_usage(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.is::<UsageError>()
            || matches!(
                e.downcast_ref::<slm::Error>(),
                Some(slm::Error::InvalidParameter { .. } | slm::Error::UnknownDataset(_))
            )
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_usage(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
