use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context};
use slm::{
    fit_boost, fit_forest, load_csv, save_csv, split, Dataset, Executor, Model,
    SearchMode, SlmTree, SplitSpec, Task,
};

use crate::config::{Family, ModelKind, RunConfig};
use crate::UsageError;

fn summary(name: &str, ds: &Dataset) -> String {
    match ds.n_classes() {
        Some(c) => format!("{name}: {} rows x {} features, {c} classes", ds.n_rows(), ds.n_features()),
        None => format!("{name}: {} rows x {} features, regression", ds.n_rows(), ds.n_features()),
    }
}

pub fn generate(name: &str, samples: usize, noise: f64, seed: u64, out: &Path) -> anyhow::Result<()> {
    let ds = slm::generate(name, samples, noise, seed)?;
    save_csv(&ds, out)?;
    println!("{} -> {}", summary(name, &ds), out.display());
    Ok(())
}

fn default_target(task: Task) -> &'static str {
    match task {
        Task::Classification => "class",
        Task::Regression => "target",
    }
}

/// Generated data for `name`, whose task must agree with the model.
pub fn synthetic(name: &str, cfg: &RunConfig, task: Task) -> anyhow::Result<Dataset> {
    let ds = slm::generate(name, cfg.samples, cfg.noise, cfg.seed)?;
    if ds.task() != task {
        return Err(UsageError(format!("dataset `{name}` is not a {task:?} dataset")).into());
    }
    Ok(ds)
}

pub fn from_csv(path: &Path, target: Option<&str>, task: Task) -> anyhow::Result<Dataset> {
    let target = target.unwrap_or(default_target(task));
    load_csv(path, target, task).with_context(|| format!("loading {}", path.display()))
}

pub fn fit(
    train: &Dataset,
    cfg: &RunConfig,
    kind: ModelKind,
    search: SearchMode,
    exec: &Executor,
) -> slm::Result<Model> {
    Ok(match kind.family() {
        Family::Tree => SlmTree::fit(train, &cfg.tree_config(kind, search), exec)?.into(),
        Family::Forest => fit_forest(train, &cfg.forest_config(kind, search), exec)?.into(),
        Family::Boost => fit_boost(train, &cfg.boost_config(kind, search), exec)?.into(),
    })
}

pub fn train(cfg: &RunConfig) -> anyhow::Result<()> {
    let task = cfg.model.task();
    let data = match (&cfg.dataset, &cfg.csv) {
        (Some(name), None) => synthetic(name, cfg, task)?,
        (None, Some(path)) => from_csv(path, cfg.target.as_deref(), task)?,
        (Some(_), Some(_)) => bail!(UsageError("set only one of `dataset` and `csv`".into())),
        (None, None) => bail!(UsageError("no data: pass --dataset or --csv".into())),
    };
    let (train, test) = if cfg.test_fraction == 0.0 {
        (data, None)
    } else {
        let (train, test) = split(
            &data,
            SplitSpec {
                test_fraction: cfg.test_fraction,
                seed: cfg.seed,
            },
        )?;
        (train, Some(test))
    };

    let exec = Executor::new(cfg.workers)?;
    let start = Instant::now();
    let model = fit(&train, cfg, cfg.model, cfg.search, &exec)?;
    let seconds = start.elapsed().as_secs_f64();

    let out = cfg.out.as_deref().unwrap_or(Path::new("model.json"));
    model.save(out)?;
    if let (Some(path), Some(test)) = (&cfg.test_out, &test) {
        save_csv(test, path)?;
    }

    println!(
        "model={} search={} workers={} train_rows={} test_rows={}",
        cfg.model,
        cfg.search,
        exec.workers(),
        train.n_rows(),
        test.as_ref().map_or(0, Dataset::n_rows)
    );
    let m = model.evaluate(&train)?;
    println!("train_{m}");
    if let Some(test) = &test {
        println!("test_{}", model.evaluate(test)?);
    }
    println!("train_seconds={seconds:.3}");
    println!("saved {}", out.display());
    Ok(())
}

pub fn eval(model_path: &Path, data: &Path, target: Option<&str>) -> anyhow::Result<()> {
    let model = Model::load(model_path)?;
    let mut ds = from_csv(data, target, model.task())?;
    if !model.class_names().is_empty() {
        ds = ds.with_class_names(model.class_names())?;
    }
    let m = model.evaluate(&ds)?;
    println!("rows={}", ds.n_rows());
    println!("{m}");
    Ok(())
}
