//! Run configuration: a flat TOML file whose keys mirror the command-line
//! flags. Precedence is built-in defaults, then the file, then flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use slm::{
    BoostConfig, ForestConfig, ProbSearchParams, SearchMode, SwarmParams, Task, TreeConfig,
};

use crate::UsageError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Slm,
    SlmForest,
    SlmBoost,
    Slr,
    SlrForest,
    SlrBoost,
}

pub enum Family {
    Tree,
    Forest,
    Boost,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Slm,
        ModelKind::SlmForest,
        ModelKind::SlmBoost,
        ModelKind::Slr,
        ModelKind::SlrForest,
        ModelKind::SlrBoost,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Slm => "slm",
            ModelKind::SlmForest => "slm-forest",
            ModelKind::SlmBoost => "slm-boost",
            ModelKind::Slr => "slr",
            ModelKind::SlrForest => "slr-forest",
            ModelKind::SlrBoost => "slr-boost",
        }
    }

    pub fn task(self) -> Task {
        match self {
            ModelKind::Slm | ModelKind::SlmForest | ModelKind::SlmBoost => Task::Classification,
            _ => Task::Regression,
        }
    }

    pub fn family(self) -> Family {
        match self {
            ModelKind::Slm | ModelKind::Slr => Family::Tree,
            ModelKind::SlmForest | ModelKind::SlrForest => Family::Forest,
            ModelKind::SlmBoost | ModelKind::SlrBoost => Family::Boost,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = ModelKind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown model `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Synthetic dataset id; exclusive with `csv`.
    pub dataset: Option<String>,
    pub csv: Option<PathBuf>,
    /// Target column of `csv`; `class` or `target` by task when unset.
    pub target: Option<String>,
    pub samples: usize,
    pub noise: f64,
    /// Test share of the train/test split; 0 trains on every row.
    pub test_fraction: f64,

    pub model: ModelKind,
    pub search: SearchMode,
    /// Ensemble size (forest trees or boosting stages).
    pub trees: usize,
    pub learning_rate: f64,
    pub bootstrap: bool,
    /// Seeds data generation, the split and training.
    pub seed: u64,

    pub top_n: usize,
    /// Defaults to 4 for boosting and 10 otherwise.
    pub max_depth: Option<usize>,
    pub min_split: usize,
    pub min_leaf: usize,
    pub purity_tol: f64,
    pub mse_tol: f64,
    pub bins: usize,

    pub candidates: usize,
    pub keep: usize,
    pub cos_max: f64,
    pub alpha0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub max_terms: usize,

    pub population: usize,
    pub max_iter: usize,
    pub adaptive: bool,
    pub omega: f64,
    pub c1: f64,
    pub c2: f64,
    pub vmax_fraction: f64,
    pub patience: Option<usize>,

    /// Worker threads; 0 means one per physical core.
    pub workers: usize,
    pub out: Option<PathBuf>,
    /// Where `train` writes the test split as CSV.
    pub test_out: Option<PathBuf>,

    pub datasets: Vec<String>,
    pub csvs: Vec<PathBuf>,
    pub models: Vec<ModelKind>,
    pub searches: Vec<SearchMode>,
    /// Worker counts compared by `bench`; empty means 1 and all physical cores.
    pub worker_counts: Vec<usize>,
    pub repetitions: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let tree = TreeConfig::default();
        let prob = ProbSearchParams::default();
        let swarm = SwarmParams::default();
        let boost = BoostConfig::default();
        let forest = ForestConfig::default();
        Self {
            dataset: None,
            csv: None,
            target: None,
            samples: 1000,
            noise: 0.1,
            test_fraction: 0.2,
            model: ModelKind::Slm,
            search: tree.search,
            trees: forest.n_trees,
            learning_rate: boost.learning_rate,
            bootstrap: forest.bootstrap,
            seed: 0,
            top_n: tree.top_n,
            max_depth: None,
            min_split: tree.min_split,
            min_leaf: tree.min_leaf,
            purity_tol: tree.purity_tol,
            mse_tol: tree.mse_tol,
            bins: tree.bins,
            candidates: prob.candidates,
            keep: prob.keep,
            cos_max: prob.cos_max,
            alpha0: prob.alpha0,
            alpha: prob.alpha,
            beta: prob.beta,
            max_terms: prob.max_terms,
            population: swarm.population,
            max_iter: swarm.max_iter,
            adaptive: swarm.adaptive,
            omega: swarm.omega,
            c1: swarm.c1,
            c2: swarm.c2,
            vmax_fraction: swarm.vmax_fraction,
            patience: swarm.patience,
            workers: 0,
            out: None,
            test_out: None,
            datasets: Vec::new(),
            csvs: Vec::new(),
            models: Vec::new(),
            searches: Vec::new(),
            worker_counts: Vec::new(),
            repetitions: 3,
        }
    }
}

impl RunConfig {
    /// Defaults overlaid with the file at `path`, if any.
    pub fn load(path: Option<&Path>) -> Result<Self, UsageError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn tree_config(&self, kind: ModelKind, search: SearchMode) -> TreeConfig {
        let default_depth = match kind.family() {
            Family::Boost => BoostConfig::default().tree.max_depth,
            _ => TreeConfig::default().max_depth,
        };
        TreeConfig {
            search,
            top_n: self.top_n,
            max_depth: self.max_depth.unwrap_or(default_depth),
            min_split: self.min_split,
            min_leaf: self.min_leaf,
            purity_tol: self.purity_tol,
            mse_tol: self.mse_tol,
            bins: self.bins,
            prob: ProbSearchParams {
                alpha0: self.alpha0,
                alpha: self.alpha,
                beta: self.beta,
                max_terms: self.max_terms,
                candidates: self.candidates,
                keep: self.keep,
                cos_max: self.cos_max,
            },
            swarm: SwarmParams {
                population: self.population,
                max_iter: self.max_iter,
                adaptive: self.adaptive,
                omega: self.omega,
                c1: self.c1,
                c2: self.c2,
                vmax_fraction: self.vmax_fraction,
                patience: self.patience,
            },
            seed: self.seed,
        }
    }

    pub fn forest_config(&self, kind: ModelKind, search: SearchMode) -> ForestConfig {
        ForestConfig {
            n_trees: self.trees,
            bootstrap: self.bootstrap,
            tree: self.tree_config(kind, search),
            seed: self.seed,
        }
    }

    pub fn boost_config(&self, kind: ModelKind, search: SearchMode) -> BoostConfig {
        BoostConfig {
            n_trees: self.trees,
            learning_rate: self.learning_rate,
            tree: self.tree_config(kind, search),
            seed: self.seed,
        }
    }

    /// Per-node search budget: candidates for probabilistic search,
    /// iterations for APSO.
    pub fn iterations(&self, search: SearchMode) -> usize {
        match search {
            SearchMode::Probabilistic => self.candidates,
            SearchMode::Apso => self.max_iter,
        }
    }
}
