//! SLM/SLR Forest (bagging) and SLM/SLR Boost (gradient boosting).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Targets, Task};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::tree::{argmax, mix_seed, Prediction, SlmTree, TreeConfig};

pub const DEFAULT_TREES: usize = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Train each tree on `N` rows drawn with replacement; otherwise on all rows.
    pub bootstrap: bool,
    pub tree: TreeConfig,
    /// Bootstrap draws and per-tree seeds derive from this; `tree.seed` is ignored.
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: DEFAULT_TREES,
            bootstrap: true,
            tree: TreeConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub task: Task,
    pub n_features: usize,
    pub n_classes: usize,
    pub class_names: Vec<String>,
    pub config: ForestConfig,
    pub trees: Vec<SlmTree>,
}

/// Bags trees; see [`ForestModel::predict`] for the aggregation rule.
pub fn fit_forest(ds: &Dataset, cfg: &ForestConfig, exec: &Executor) -> Result<ForestModel> {
    if cfg.n_trees == 0 {
        return Err(Error::invalid("n_trees", "must be >= 1"));
    }
    cfg.tree.validate()?;
    let n = ds.n_rows();
    let mut trees = Vec::with_capacity(cfg.n_trees);
    for i in 0..cfg.n_trees as u64 {
        let rows: Vec<usize> = if cfg.bootstrap {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, 2 * i));
            (0..n).map(|_| rng.random_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        let tree_cfg = TreeConfig {
            seed: mix_seed(cfg.seed, 2 * i + 1),
            ..cfg.tree.clone()
        };
        trees.push(SlmTree::build(ds, &rows, &tree_cfg, exec)?);
    }
    Ok(ForestModel {
        task: ds.task(),
        n_features: ds.n_features(),
        n_classes: ds.n_classes().unwrap_or(0),
        class_names: ds.class_names().map(<[String]>::to_vec).unwrap_or_default(),
        config: cfg.clone(),
        trees,
    })
}

impl ForestModel {
    /// Majority vote (ties to the smallest class id) or mean of the trees.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        match self.task {
            Task::Classification => {
                let mut votes = vec![0.0; self.n_classes];
                for t in &self.trees {
                    if let Prediction::Class(c) = t.predict(x)? {
                        votes[c] += 1.0;
                    }
                }
                Ok(Prediction::Class(argmax(&votes)))
            }
            Task::Regression => {
                let mut sum = 0.0;
                for t in &self.trees {
                    sum += t.predict(x)?.as_f64();
                }
                Ok(Prediction::Value(sum / self.trees.len() as f64))
            }
        }
    }

    /// Mean of the trees' leaf distributions.
    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut mean = vec![0.0; self.n_classes];
        for t in &self.trees {
            for (m, p) in mean.iter_mut().zip(t.predict_proba(x)?) {
                *m += p;
            }
        }
        let k = self.trees.len() as f64;
        mean.iter_mut().for_each(|m| *m /= k);
        Ok(mean)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoostConfig {
    /// Number of stages.
    pub n_trees: usize,
    pub learning_rate: f64,
    /// Settings of the regression trees fit to residuals; `tree.seed` is ignored.
    pub tree: TreeConfig,
    pub seed: u64,
}

impl Default for BoostConfig {
    fn default() -> Self {
        Self {
            n_trees: DEFAULT_TREES,
            learning_rate: 0.1,
            tree: TreeConfig {
                max_depth: 4,
                ..TreeConfig::default()
            },
            seed: 0,
        }
    }
}

/// Gradient-boosted trees.
///
/// Regression keeps one score. Binary classification keeps one logit for
/// class 1 (class 0 fixed at 0); `C > 2` classes keep one score per class.
/// Probabilities are the softmax of the scores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostModel {
    pub task: Task,
    pub n_features: usize,
    pub n_classes: usize,
    pub class_names: Vec<String>,
    pub config: BoostConfig,
    pub base_score: Vec<f64>,
    /// One entry per stage, each holding one tree per score.
    pub stages: Vec<Vec<SlmTree>>,
    /// Training loss (MSE or mean log-loss) before the first stage and after
    /// each stage.
    pub history: Vec<f64>,
}

fn n_scores(task: Task, n_classes: usize) -> usize {
    match task {
        Task::Regression => 1,
        Task::Classification if n_classes == 2 => 1,
        Task::Classification => n_classes,
    }
}

/// Class log-probabilities from raw scores.
fn log_softmax(scores: &[f64], n_classes: usize) -> Vec<f64> {
    let full: Vec<f64> = if n_classes == 2 && scores.len() == 1 {
        vec![0.0, scores[0]]
    } else {
        scores.to_vec()
    };
    let max = full.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + full.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
    full.iter().map(|s| s - lse).collect()
}

fn training_loss(ds: &Dataset, scores: &[Vec<f64>], n_classes: usize) -> f64 {
    let n = ds.n_rows() as f64;
    match ds.targets() {
        Targets::Values(y) => {
            y.iter()
                .zip(scores)
                .map(|(y, s)| (y - s[0]).powi(2))
                .sum::<f64>()
                / n
        }
        Targets::Classes { labels, .. } => {
            -labels
                .iter()
                .zip(scores)
                .map(|(&l, s)| log_softmax(s, n_classes)[l])
                .sum::<f64>()
                / n
        }
    }
}

const MIN_PRIOR: f64 = 1e-12;

pub fn fit_boost(ds: &Dataset, cfg: &BoostConfig, exec: &Executor) -> Result<BoostModel> {
    if cfg.n_trees == 0 {
        return Err(Error::invalid("n_trees", "must be >= 1"));
    }
    if !(cfg.learning_rate > 0.0 && cfg.learning_rate <= 1.0) {
        return Err(Error::invalid("learning_rate", "must lie in (0, 1]"));
    }
    cfg.tree.validate()?;
    let n = ds.n_rows();
    let n_classes = ds.n_classes().unwrap_or(0);
    let k = n_scores(ds.task(), n_classes);

    let base_score = match ds.targets() {
        Targets::Values(y) => vec![y.iter().sum::<f64>() / n as f64],
        Targets::Classes { labels, .. } => {
            let mut counts = vec![0.0; n_classes];
            labels.iter().for_each(|&l| counts[l] += 1.0);
            let log_prior: Vec<f64> = counts
                .iter()
                .map(|c| (c / n as f64).max(MIN_PRIOR).ln())
                .collect();
            if k == 1 {
                vec![log_prior[1] - log_prior[0]]
            } else {
                log_prior
            }
        }
    };

    let mut scores = vec![base_score.clone(); n];
    let mut history = vec![training_loss(ds, &scores, n_classes)];
    let mut stages = Vec::with_capacity(cfg.n_trees);
    for stage in 0..cfg.n_trees {
        let probs: Option<Vec<Vec<f64>>> = ds.labels().map(|_| {
            scores
                .iter()
                .map(|s| log_softmax(s, n_classes).iter().map(|l| l.exp()).collect())
                .collect()
        });
        let mut trees = Vec::with_capacity(k);
        for c in 0..k {
            let residual: Vec<f64> = match (ds.targets(), &probs) {
                (Targets::Values(y), _) => {
                    y.iter().zip(&scores).map(|(y, s)| y - s[0]).collect()
                }
                (Targets::Classes { labels, .. }, Some(p)) => {
                    // Binary scores are the class-1 logit.
                    let class = if k == 1 { 1 } else { c };
                    labels
                        .iter()
                        .zip(p)
                        .map(|(&l, p)| f64::from(u8::from(l == class)) - p[class])
                        .collect()
                }
                (Targets::Classes { .. }, None) => unreachable!(),
            };
            let residual_ds = ds.with_regression_targets(residual)?;
            let tree_cfg = TreeConfig {
                seed: mix_seed(cfg.seed, (stage * k + c) as u64),
                ..cfg.tree.clone()
            };
            trees.push(SlmTree::fit(&residual_ds, &tree_cfg, exec)?);
        }
        for (i, s) in scores.iter_mut().enumerate() {
            for (c, t) in trees.iter().enumerate() {
                s[c] += cfg.learning_rate * t.predict(ds.row(i))?.as_f64();
            }
        }
        history.push(training_loss(ds, &scores, n_classes));
        stages.push(trees);
    }

    Ok(BoostModel {
        task: ds.task(),
        n_features: ds.n_features(),
        n_classes,
        class_names: ds.class_names().map(<[String]>::to_vec).unwrap_or_default(),
        config: cfg.clone(),
        base_score,
        stages,
        history,
    })
}

impl BoostModel {
    /// Raw additive scores for `x`.
    pub fn decision_function(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        let mut scores = self.base_score.clone();
        for stage in &self.stages {
            for (s, t) in scores.iter_mut().zip(stage) {
                *s += self.config.learning_rate * t.predict(x)?.as_f64();
            }
        }
        Ok(scores)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        match self.task {
            Task::Regression => Ok(Prediction::Value(self.decision_function(x)?[0])),
            Task::Classification => Ok(Prediction::Class(argmax(&self.predict_proba(x)?))),
        }
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.task != Task::Classification {
            return Err(Error::TaskMismatch(
                "class probabilities need a classification model",
            ));
        }
        let scores = self.decision_function(x)?;
        Ok(log_softmax(&scores, self.n_classes)
            .into_iter()
            .map(f64::exp)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate;
    use crate::tree::{Leaf, LeafValue, Node};

    fn leaf_tree(class: usize, n_classes: usize) -> SlmTree {
        let mut dist = vec![0.0; n_classes];
        dist[class] = 1.0;
        SlmTree {
            task: Task::Classification,
            n_features: 2,
            n_classes,
            class_names: vec![],
            config: TreeConfig::default(),
            root: Node::Leaf(Leaf {
                value: LeafValue::Distribution(dist),
                n_samples: 1,
            }),
        }
    }

    fn forest_of(trees: Vec<SlmTree>) -> ForestModel {
        ForestModel {
            task: Task::Classification,
            n_features: 2,
            n_classes: 2,
            class_names: vec!["0".into(), "1".into()],
            config: ForestConfig::default(),
            trees,
        }
    }

    #[test]
    fn majority_vote() {
        let f = forest_of(vec![leaf_tree(0, 2), leaf_tree(0, 2), leaf_tree(1, 2)]);
        assert_eq!(f.predict(&[0.0, 0.0]).unwrap(), Prediction::Class(0));
        let tie = forest_of(vec![leaf_tree(1, 2), leaf_tree(0, 2)]);
        assert_eq!(tie.predict(&[0.0, 0.0]).unwrap(), Prediction::Class(0));
    }

    #[test]
    fn identical_leaves() {
        let f = forest_of(vec![leaf_tree(1, 2); 4]);
        assert_eq!(f.predict(&[3.0, -2.0]).unwrap(), Prediction::Class(1));
        assert_eq!(f.predict_proba(&[3.0, -2.0]).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn zero_stages_give_base_score() {
        let m = BoostModel {
            task: Task::Regression,
            n_features: 1,
            n_classes: 0,
            class_names: vec![],
            config: BoostConfig::default(),
            base_score: vec![2.5],
            stages: vec![],
            history: vec![],
        };
        assert_eq!(m.predict(&[9.0]).unwrap(), Prediction::Value(2.5));
    }

    #[test]
    fn single_unbagged_tree_matches_tree() {
        let ds = generate("moons-2", 200, 0.2, 1).unwrap();
        let cfg = ForestConfig {
            n_trees: 1,
            bootstrap: false,
            tree: TreeConfig {
                max_depth: 4,
                ..TreeConfig::default()
            },
            seed: 5,
        };
        let exec = Executor::sequential();
        let forest = fit_forest(&ds, &cfg, &exec).unwrap();
        let tree = SlmTree::fit(&ds, &forest.trees[0].config, &exec).unwrap();
        for i in 0..ds.n_rows() {
            assert_eq!(forest.predict(ds.row(i)).unwrap(), tree.predict(ds.row(i)).unwrap());
        }
    }

    #[test]
    fn boost_history_is_monotone() {
        let exec = Executor::sequential();
        for name in ["friedman1", "moons-2", "moons-4"] {
            let ds = generate(name, 300, 0.1, 2).unwrap();
            let cfg = BoostConfig {
                n_trees: 5,
                tree: TreeConfig {
                    max_depth: 3,
                    ..BoostConfig::default().tree
                },
                ..BoostConfig::default()
            };
            let m = fit_boost(&ds, &cfg, &exec).unwrap();
            assert_eq!(m.history.len(), 6);
            assert!(m.history.windows(2).all(|w| w[1] <= w[0]), "{name}: {:?}", m.history);
            let k = if name == "moons-4" { 4 } else { 1 };
            assert!(m.stages.iter().all(|s| s.len() == k));
        }
    }

    #[test]
    fn boost_probabilities_sum_to_one() {
        let ds = generate("moons-4", 200, 0.1, 4).unwrap();
        let cfg = BoostConfig {
            n_trees: 2,
            ..BoostConfig::default()
        };
        let m = fit_boost(&ds, &cfg, &Executor::sequential()).unwrap();
        let p = m.predict_proba(ds.row(0)).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        let ds = generate("friedman1", 50, 0.0, 0).unwrap();
        let exec = Executor::sequential();
        let zero = BoostConfig {
            n_trees: 0,
            ..BoostConfig::default()
        };
        assert!(fit_boost(&ds, &zero, &exec).is_err());
        let eta = BoostConfig {
            learning_rate: 1.5,
            ..BoostConfig::default()
        };
        assert!(fit_boost(&ds, &eta, &exec).is_err());
        let forest = ForestConfig {
            n_trees: 0,
            ..ForestConfig::default()
        };
        assert!(fit_forest(&ds, &forest, &exec).is_err());
    }
}
