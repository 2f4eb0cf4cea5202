//! Benchmark grid: every (dataset, model, search, workers) cell is trained
//! `repetitions` times and reported as the median wall time.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use slm::exec::physical_cores;
use slm::{split, Dataset, Executor, Metric, SearchMode, SplitSpec, Task};

use crate::commands::{fit, from_csv, synthetic};
use crate::config::{ModelKind, RunConfig};

enum Source {
    Synthetic(String),
    Csv(PathBuf),
}

impl Source {
    fn label(&self) -> String {
        match self {
            Source::Synthetic(name) => name.clone(),
            Source::Csv(path) => path
                .file_stem()
                .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned()),
        }
    }

    /// `None` when the data cannot serve `task` (wrong kind of target).
    fn load(&self, cfg: &RunConfig, task: Task) -> anyhow::Result<Option<Dataset>> {
        match self {
            Source::Synthetic(name) => {
                let id: slm::DatasetId = name.parse()?;
                if id.task() != task {
                    return Ok(None);
                }
                synthetic(name, cfg, task).map(Some)
            }
            Source::Csv(path) => match from_csv(path, cfg.target.as_deref(), task) {
                Ok(ds) => Ok(Some(ds)),
                Err(e) if e.chain().any(|c| {
                    matches!(c.downcast_ref::<slm::Error>(), Some(slm::Error::MissingColumn(_)))
                }) =>
                {
                    Ok(None)
                }
                Err(e) => Err(e),
            },
        }
    }
}

pub struct Cell {
    pub dataset: String,
    pub model: ModelKind,
    pub search: SearchMode,
    pub workers: usize,
    pub seconds: f64,
    pub metric: Metric,
    pub iterations: usize,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn grid(cfg: &RunConfig) -> anyhow::Result<Vec<Cell>> {
    let mut sources: Vec<Source> = cfg.datasets.iter().cloned().map(Source::Synthetic).collect();
    sources.extend(cfg.csvs.iter().cloned().map(Source::Csv));
    if sources.is_empty() {
        sources.push(Source::Synthetic("moons-2".into()));
    }
    let models = if cfg.models.is_empty() { vec![cfg.model] } else { cfg.models.clone() };
    let searches = if cfg.searches.is_empty() { vec![cfg.search] } else { cfg.searches.clone() };
    let mut workers = if cfg.worker_counts.is_empty() {
        vec![1, physical_cores()]
    } else {
        cfg.worker_counts.clone()
    };
    workers.dedup();
    let reps = cfg.repetitions.max(1);

    let mut cells = Vec::new();
    for source in &sources {
        for &model in &models {
            let Some(data) = source.load(cfg, model.task())? else {
                continue;
            };
            let (train, test) = split(
                &data,
                SplitSpec {
                    test_fraction: cfg.test_fraction,
                    seed: cfg.seed,
                },
            )?;
            for &search in &searches {
                for &w in &workers {
                    let exec = Executor::new(w)?;
                    let mut times = Vec::with_capacity(reps);
                    let mut fitted = None;
                    for _ in 0..reps {
                        let start = Instant::now();
                        fitted = Some(fit(&train, cfg, model, search, &exec)?);
                        times.push(start.elapsed().as_secs_f64());
                    }
                    let metric = fitted.expect("at least one repetition").evaluate(&test)?;
                    cells.push(Cell {
                        dataset: source.label(),
                        model,
                        search,
                        workers: exec.workers(),
                        seconds: median(times),
                        metric,
                        iterations: cfg.iterations(search),
                    });
                }
            }
        }
    }
    Ok(cells)
}

pub fn markdown(cells: &[Cell], reps: usize) -> String {
    let mut datasets: Vec<&str> = Vec::new();
    for c in cells {
        if !datasets.contains(&c.dataset.as_str()) {
            datasets.push(&c.dataset);
        }
    }
    let mut keys: Vec<(ModelKind, SearchMode, usize)> = Vec::new();
    for c in cells {
        let k = (c.model, c.search, c.workers);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let lookup = |k: (ModelKind, SearchMode, usize), d: &str| {
        cells
            .iter()
            .find(|c| (c.model, c.search, c.workers) == k && c.dataset == d)
    };

    let mut md = String::new();
    let _ = writeln!(md, "## Training time (median seconds over {reps} runs)\n");
    let _ = writeln!(md, "| Model | Search | Workers | {} |", datasets.join(" | "));
    let _ = writeln!(md, "|---|---|---|{}", "---|".repeat(datasets.len()));
    for &k in &keys {
        let row: Vec<String> = datasets
            .iter()
            .map(|d| lookup(k, d).map_or("-".into(), |c| format!("{:.3}", c.seconds)))
            .collect();
        let _ = writeln!(md, "| {} | {} | {} | {} |", k.0, k.1, k.2, row.join(" | "));
    }

    let _ = writeln!(md, "\n## Test metric\n");
    let _ = writeln!(
        md,
        "| Model | Search | {} | Number of Iteration |",
        datasets.join(" | ")
    );
    let _ = writeln!(md, "|---|---|{}---|", "---|".repeat(datasets.len()));
    let mut seen: Vec<(ModelKind, SearchMode)> = Vec::new();
    for &(m, s, _) in &keys {
        if seen.contains(&(m, s)) {
            continue;
        }
        seen.push((m, s));
        let first = |d: &str| cells.iter().find(|c| c.model == m && c.search == s && c.dataset == d);
        let row: Vec<String> = datasets
            .iter()
            .map(|d| first(d).map_or("-".into(), |c| format!("{} {:.4}", c.metric.name(), c.metric.value())))
            .collect();
        let iters = cells
            .iter()
            .find(|c| c.model == m && c.search == s)
            .map_or(0, |c| c.iterations);
        let _ = writeln!(md, "| {m} | {s} | {} | {iters} |", row.join(" | "));
    }
    md
}

fn write_csv(cells: &[Cell], reps: usize, path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record([
        "dataset",
        "model",
        "search",
        "workers",
        "repetitions",
        "median_seconds",
        "metric",
        "value",
        "iterations",
    ])?;
    for c in cells {
        w.write_record([
            c.dataset.clone(),
            c.model.to_string(),
            c.search.to_string(),
            c.workers.to_string(),
            reps.to_string(),
            c.seconds.to_string(),
            c.metric.name().to_string(),
            c.metric.value().to_string(),
            c.iterations.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(cfg: &RunConfig) -> anyhow::Result<()> {
    let cells = grid(cfg)?;
    if cells.is_empty() {
        anyhow::bail!(crate::UsageError(
            "no dataset matches the requested models' tasks".into()
        ));
    }
    let reps = cfg.repetitions.max(1);
    let md = markdown(&cells, reps);
    let prefix = cfg.out.clone().unwrap_or_else(|| PathBuf::from("bench"));
    let md_path = prefix.with_extension("md");
    let csv_path = prefix.with_extension("csv");
    std::fs::write(&md_path, &md).with_context(|| format!("writing {}", md_path.display()))?;
    write_csv(&cells, reps, &csv_path)?;
    print!("{md}");
    println!("\nwrote {} and {}", md_path.display(), csv_path.display());
    Ok(())
}
