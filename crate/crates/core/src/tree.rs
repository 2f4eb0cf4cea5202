//! SLM / SLR trees: hierarchical partitioning by learned 1D projections.
//!
//! At each node the raw dimensions are ranked by DFT loss and the search is
//! restricted to the `top_n` most discriminant ones. Two search strategies
//! produce the projection:
//!
//! * [`SearchMode::Probabilistic`] samples `candidates` sparse integer
//!   projections, scores all of them and keeps up to `keep` diverse winners;
//! * [`SearchMode::Apso`] runs a (by default adaptive) particle swarm whose
//!   positions, normalized to unit length, are the projection vectors and
//!   whose loss is the DFT loss. The global best becomes the single split.
//!
//! A sample goes to the "right" of a hyperplane when `a^T x >= threshold`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Task};
use crate::dft::{
    best_split, evaluate_generated, impurity, DftRanking, OwnedTargets, Projected1D, SplitRecord,
    DEFAULT_BINS,
};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::probsearch::{sample_projection, select_diverse, ProbSearchParams, ProjectionVector};
use crate::pso::{optimize, SwarmConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMode {
    #[serde(rename = "prob")]
    Probabilistic,
    #[serde(rename = "apso")]
    Apso,
}

impl std::str::FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prob" | "probabilistic" => Ok(SearchMode::Probabilistic),
            "apso" => Ok(SearchMode::Apso),
            other => Err(Error::invalid(
                "search",
                format!("expected `prob` or `apso`, got `{other}`"),
            )),
        }
    }
}

impl std::fmt::Display for SearchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SearchMode::Probabilistic => "prob",
            SearchMode::Apso => "apso",
        })
    }
}

/// Swarm settings shared by every node; the box is always `[-1, 1]^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwarmParams {
    pub population: usize,
    pub max_iter: usize,
    pub adaptive: bool,
    pub omega: f64,
    pub c1: f64,
    pub c2: f64,
    /// `vmax` as a fraction of the box width.
    pub vmax_fraction: f64,
    pub patience: Option<usize>,
}

impl Default for SwarmParams {
    fn default() -> Self {
        Self {
            population: 20,
            max_iter: 110,
            adaptive: true,
            omega: 0.9,
            c1: 2.0,
            c2: 2.0,
            vmax_fraction: 0.2,
            patience: None,
        }
    }
}

impl SwarmParams {
    fn config(&self, dim: usize, seed: u64) -> SwarmConfig {
        SwarmConfig {
            population: self.population,
            max_iter: self.max_iter,
            omega: self.omega,
            c1: self.c1,
            c2: self.c2,
            lower: vec![-1.0; dim],
            upper: vec![1.0; dim],
            vmax: self.vmax_fraction * 2.0,
            adaptive: self.adaptive,
            patience: self.patience,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeConfig {
    pub search: SearchMode,
    /// Number of top-ranked raw dimensions the projection search works in.
    pub top_n: usize,
    pub max_depth: usize,
    pub min_split: usize,
    pub min_leaf: usize,
    /// A classification node is a leaf once its majority class reaches
    /// `1 - purity_tol` of the samples.
    pub purity_tol: f64,
    /// A regression node is a leaf once its MSE is at most this.
    pub mse_tol: f64,
    pub bins: usize,
    pub prob: ProbSearchParams,
    pub swarm: SwarmParams,
    pub seed: u64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            search: SearchMode::Apso,
            top_n: 10,
            max_depth: 10,
            min_split: 10,
            min_leaf: 2,
            purity_tol: 0.01,
            mse_tol: 1e-12,
            bins: DEFAULT_BINS,
            prob: ProbSearchParams::default(),
            swarm: SwarmParams::default(),
            seed: 0,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.top_n == 0 {
            return Err(Error::invalid("top_n", "must be >= 1"));
        }
        if self.min_leaf == 0 {
            return Err(Error::invalid("min_leaf", "must be >= 1"));
        }
        if self.min_split < 2 * self.min_leaf {
            return Err(Error::invalid("min_split", "must be >= 2 * min_leaf"));
        }
        if self.bins < 2 {
            return Err(Error::invalid("bins", "must be >= 2"));
        }
        if !(0.0..1.0).contains(&self.purity_tol) {
            return Err(Error::invalid("purity_tol", "must lie in [0, 1)"));
        }
        if !(self.mse_tol >= 0.0) {
            return Err(Error::invalid("mse_tol", "must be >= 0"));
        }
        self.prob.validate()?;
        self.swarm.config(1, 0).validate()
    }
}

/// Oblique cut `coeffs . x[dims] >= threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub dims: Vec<usize>,
    pub coeffs: Vec<f64>,
    pub threshold: f64,
}

impl Hyperplane {
    #[inline]
    pub fn project(&self, x: &[f64]) -> f64 {
        self.dims
            .iter()
            .zip(&self.coeffs)
            .fold(0.0, |acc, (&d, &c)| acc + c * x[d])
    }

    #[inline]
    pub fn goes_right(&self, x: &[f64]) -> bool {
        self.project(x) >= self.threshold
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeafValue {
    /// Class frequencies of the training samples in the leaf.
    Distribution(Vec<f64>),
    /// Mean target of the training samples in the leaf.
    Mean(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    pub value: LeafValue,
    pub n_samples: usize,
}

/// Internal node routed as a decision list: a sample goes to `children[i]`
/// for the first `i` whose hyperplane it is on the right of, and to the last
/// child otherwise. A binary node has one hyperplane; `children[0]` is its
/// `>=` side and `children[1]` its `<` side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitNode {
    pub splits: Vec<Hyperplane>,
    pub children: Vec<Node>,
    pub n_samples: usize,
    /// No-split impurity of the node.
    pub impurity: f64,
    /// DFT loss of the first hyperplane.
    pub loss: f64,
}

impl SplitNode {
    #[inline]
    pub fn route(&self, x: &[f64]) -> usize {
        self.splits
            .iter()
            .position(|h| h.goes_right(x))
            .unwrap_or(self.splits.len())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Node {
    Leaf(Leaf),
    Split(SplitNode),
}

impl Node {
    pub fn n_samples(&self) -> usize {
        match self {
            Node::Leaf(l) => l.n_samples,
            Node::Split(s) => s.n_samples,
        }
    }

    fn depth(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Split(s) => 1 + s.children.iter().map(Node::depth).max().unwrap_or(0),
        }
    }

    fn count(&self, leaves: &mut usize, splits: &mut usize) {
        match self {
            Node::Leaf(_) => *leaves += 1,
            Node::Split(s) => {
                *splits += 1;
                s.children.iter().for_each(|c| c.count(leaves, splits));
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Prediction {
    Class(usize),
    Value(f64),
}

impl Prediction {
    pub fn as_f64(self) -> f64 {
        match self {
            Prediction::Class(c) => c as f64,
            Prediction::Value(v) => v,
        }
    }
}

/// Index of the largest entry, the first one on ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > values[best] { i } else { best })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlmTree {
    pub task: Task,
    pub n_features: usize,
    /// Number of classes; 0 for regression.
    pub n_classes: usize,
    /// Name of each class id; empty for regression.
    pub class_names: Vec<String>,
    pub config: TreeConfig,
    pub root: Node,
}

impl SlmTree {
    /// Trains on every row of `ds`.
    pub fn fit(ds: &Dataset, cfg: &TreeConfig, exec: &Executor) -> Result<Self> {
        let rows: Vec<usize> = (0..ds.n_rows()).collect();
        Self::build(ds, &rows, cfg, exec)
    }

    /// Trains on `rows` of `ds` (duplicates allowed, e.g. bootstrap samples).
    pub fn build(ds: &Dataset, rows: &[usize], cfg: &TreeConfig, exec: &Executor) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("training rows"));
        }
        cfg.validate()?;
        let builder = Builder { ds, cfg, exec };
        let root = builder.node(rows, 0, cfg.seed)?;
        Ok(Self {
            task: ds.task(),
            n_features: ds.n_features(),
            n_classes: ds.n_classes().unwrap_or(0),
            class_names: ds.class_names().map(<[String]>::to_vec).unwrap_or_default(),
            config: cfg.clone(),
            root,
        })
    }

    pub fn leaf(&self, x: &[f64]) -> Result<&Leaf> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf(leaf) => return Ok(leaf),
                Node::Split(s) => node = &s.children[s.route(x)],
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        Ok(match &self.leaf(x)?.value {
            LeafValue::Distribution(p) => Prediction::Class(argmax(p)),
            LeafValue::Mean(m) => Prediction::Value(*m),
        })
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<&[f64]> {
        match &self.leaf(x)?.value {
            LeafValue::Distribution(p) => Ok(p),
            LeafValue::Mean(_) => Err(Error::TaskMismatch(
                "class probabilities need a classification tree",
            )),
        }
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// `(leaves, internal nodes)`.
    pub fn node_counts(&self) -> (usize, usize) {
        let (mut leaves, mut splits) = (0, 0);
        self.root.count(&mut leaves, &mut splits);
        (leaves, splits)
    }
}

/// SplitMix64 step; derives independent per-node and per-tree seeds.
pub(crate) fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed
        .wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Builder<'a> {
    ds: &'a Dataset,
    cfg: &'a TreeConfig,
    exec: &'a Executor,
}

/// Node samples restricted to the search dimensions, row-major.
struct SubMatrix {
    values: Vec<f64>,
    width: usize,
}

impl SubMatrix {
    fn gather(ds: &Dataset, rows: &[usize], dims: &[usize]) -> Self {
        let mut values = Vec::with_capacity(rows.len() * dims.len());
        for &r in rows {
            let row = ds.row(r);
            values.extend(dims.iter().map(|&d| row[d]));
        }
        Self {
            values,
            width: dims.len(),
        }
    }

    /// Same summation order as [`Hyperplane::project`] (zero terms add
    /// nothing), so thresholds found here route identically at predict time.
    fn project(&self, coeffs: &[f64]) -> Vec<f64> {
        self.values
            .chunks_exact(self.width)
            .map(|row| {
                row.iter()
                    .zip(coeffs)
                    .filter(|(_, &c)| c != 0.0)
                    .fold(0.0, |acc, (&x, &c)| acc + c * x)
            })
            .collect()
    }
}

impl Builder<'_> {
    fn leaf(&self, targets: &OwnedTargets) -> Node {
        let value = match targets {
            OwnedTargets::Classes { labels, n_classes } => {
                let mut dist = vec![0.0; *n_classes];
                for &l in labels {
                    dist[l] += 1.0;
                }
                let n = labels.len() as f64;
                dist.iter_mut().for_each(|p| *p /= n);
                LeafValue::Distribution(dist)
            }
            OwnedTargets::Values(v) => {
                LeafValue::Mean(v.iter().sum::<f64>() / v.len() as f64)
            }
        };
        Node::Leaf(Leaf {
            value,
            n_samples: targets.view().len(),
        })
    }

    fn should_stop(&self, targets: &OwnedTargets, depth: usize) -> bool {
        let n = targets.view().len();
        if depth >= self.cfg.max_depth || n < self.cfg.min_split {
            return true;
        }
        match targets {
            OwnedTargets::Classes { labels, n_classes } => {
                let mut counts = vec![0usize; *n_classes];
                labels.iter().for_each(|&l| counts[l] += 1);
                let majority = *counts.iter().max().unwrap_or(&0) as f64 / n as f64;
                majority >= 1.0 - self.cfg.purity_tol
            }
            OwnedTargets::Values(_) => impurity(targets.view()) <= self.cfg.mse_tol,
        }
    }

    fn rank(&self, rows: &[usize], targets: &OwnedTargets) -> Result<DftRanking> {
        let view = targets.view();
        let losses = evaluate_generated(
            self.exec,
            self.ds.n_features(),
            self.cfg.bins,
            self.cfg.min_leaf,
            |d| {
                let values = rows.iter().map(|&r| self.ds.value(r, d)).collect();
                Projected1D::new_unchecked(values, view)
            },
        )?;
        Ok(DftRanking::from_losses(losses.iter().map(|r| r.loss).collect()))
    }

    fn node(&self, rows: &[usize], depth: usize, seed: u64) -> Result<Node> {
        let targets = OwnedTargets::gather(self.ds.targets(), rows);
        if self.should_stop(&targets, depth) {
            return Ok(self.leaf(&targets));
        }
        let parent = impurity(targets.view());
        let ranking = self.rank(rows, &targets)?;
        let top: Vec<usize> = ranking.order()[..self.cfg.top_n.min(ranking.len())].to_vec();
        let sub = SubMatrix::gather(self.ds, rows, &top);

        let found = match self.cfg.search {
            SearchMode::Probabilistic => {
                self.probabilistic(&ranking.top(top.len()), &sub, &targets, seed)?
            }
            SearchMode::Apso => self.apso(&sub, &targets, parent, seed)?,
        };
        let hyperplanes: Vec<(Hyperplane, f64)> = found
            .into_iter()
            .filter(|(_, rec)| !rec.degenerate && rec.loss < parent)
            .map(|(coeffs, rec)| {
                let (dims, coeffs) = top
                    .iter()
                    .zip(coeffs.coeffs())
                    .filter(|(_, &c)| c != 0.0)
                    .map(|(&d, &c)| (d, c))
                    .unzip();
                (
                    Hyperplane {
                        dims,
                        coeffs,
                        threshold: rec.threshold,
                    },
                    rec.loss,
                )
            })
            .collect();
        let Some(first_loss) = hyperplanes.first().map(|h| h.1) else {
            return Ok(self.leaf(&targets));
        };

        // Decision-list partition; later hyperplanes that would leave a child
        // below min_leaf are dropped.
        let mut remaining: Vec<usize> = rows.to_vec();
        let mut splits = Vec::new();
        let mut parts: Vec<Vec<usize>> = Vec::new();
        for (h, _) in hyperplanes {
            let (right, left): (Vec<usize>, Vec<usize>) = remaining
                .iter()
                .partition(|&&r| h.goes_right(self.ds.row(r)));
            if right.len() < self.cfg.min_leaf || left.len() < self.cfg.min_leaf {
                continue;
            }
            splits.push(h);
            parts.push(right);
            remaining = left;
        }
        if splits.is_empty() {
            return Ok(self.leaf(&targets));
        }
        parts.push(remaining);

        let mut children = Vec::with_capacity(parts.len());
        for (i, part) in parts.iter().enumerate() {
            children.push(self.node(part, depth + 1, mix_seed(seed, i as u64 + 1))?);
        }
        Ok(Node::Split(SplitNode {
            splits,
            children,
            n_samples: rows.len(),
            impurity: parent,
            loss: first_loss,
        }))
    }

    fn probabilistic(
        &self,
        ranking: &DftRanking,
        sub: &SubMatrix,
        targets: &OwnedTargets,
        seed: u64,
    ) -> Result<Vec<(ProjectionVector, SplitRecord)>> {
        let params = &self.cfg.prob;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vectors = (0..params.candidates)
            .map(|_| sample_projection(ranking, params, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        let view = targets.view();
        let records = evaluate_generated(
            self.exec,
            vectors.len(),
            self.cfg.bins,
            self.cfg.min_leaf,
            |i| Projected1D::new_unchecked(sub.project(vectors[i].coeffs()), view),
        )?;
        let scored: Vec<(ProjectionVector, f64)> = vectors
            .iter()
            .zip(&records)
            .filter(|(_, r)| !r.degenerate)
            .map(|(v, r)| (v.clone(), r.loss))
            .collect();
        let valid: Vec<usize> = records
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.degenerate)
            .map(|(i, _)| i)
            .collect();
        Ok(select_diverse(&scored, params.keep, params.cos_max)
            .into_iter()
            .map(|k| (scored[k].0.clone(), records[valid[k]]))
            .collect())
    }

    fn apso(
        &self,
        sub: &SubMatrix,
        targets: &OwnedTargets,
        parent: f64,
        seed: u64,
    ) -> Result<Vec<(ProjectionVector, SplitRecord)>> {
        let view = targets.view();
        let (bins, min_leaf) = (self.cfg.bins, self.cfg.min_leaf);
        let split_for = |position: &[f64]| -> Option<(ProjectionVector, SplitRecord)> {
            let v = ProjectionVector::new(position.to_vec()).ok()?;
            let p = Projected1D::new_unchecked(sub.project(v.coeffs()), view);
            let rec = best_split(&p, bins, min_leaf).ok()?;
            Some((v, rec))
        };
        let loss = |position: &[f64]| split_for(position).map_or(parent, |(_, r)| r.loss);
        let cfg = self.cfg.swarm.config(sub.width, seed);
        let outcome = optimize(&loss, &cfg, self.exec)?;
        Ok(split_for(&outcome.best_position).into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate, Targets};

    fn small_cfg(search: SearchMode) -> TreeConfig {
        TreeConfig {
            search,
            max_depth: 2,
            min_split: 2,
            min_leaf: 1,
            purity_tol: 0.0,
            ..TreeConfig::default()
        }
    }

    fn xor() -> Dataset {
        Dataset::new(
            vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0],
            2,
            vec!["a".into(), "b".into()],
            "class",
            Targets::Classes {
                labels: vec![0, 1, 1, 0],
                names: vec!["0".into(), "1".into()],
            },
        )
        .unwrap()
    }

    #[test]
    fn pure_input_is_a_single_leaf() {
        let ds = Dataset::new(
            vec![0.0, 1.0, 2.0, 3.0],
            1,
            vec!["a".into()],
            "class",
            Targets::Classes {
                labels: vec![1, 1, 1, 1],
                names: vec!["0".into(), "1".into()],
            },
        )
        .unwrap();
        let tree = SlmTree::fit(&ds, &TreeConfig::default(), &Executor::sequential()).unwrap();
        assert_eq!(tree.root, Node::Leaf(Leaf {
            value: LeafValue::Distribution(vec![0.0, 1.0]),
            n_samples: 4,
        }));
        assert_eq!(tree.predict(&[100.0]).unwrap(), Prediction::Class(1));
        assert_eq!(tree.predict_proba(&[-3.0]).unwrap(), &[0.0, 1.0]);
    }

    #[test]
    fn xor_needs_two_levels() {
        let ds = xor();
        for search in [SearchMode::Apso, SearchMode::Probabilistic] {
            let tree = SlmTree::fit(&ds, &small_cfg(search), &Executor::sequential()).unwrap();
            assert_eq!(tree.depth(), 2, "{search}");
            for i in 0..4 {
                assert_eq!(
                    tree.predict(ds.row(i)).unwrap(),
                    Prediction::Class(ds.labels().unwrap()[i])
                );
            }
        }
    }

    #[test]
    fn depth_one_cannot_fit_xor() {
        // Any single line leaves at least one of the four points misrouted.
        let cfg = TreeConfig {
            max_depth: 1,
            ..small_cfg(SearchMode::Apso)
        };
        let ds = xor();
        let tree = SlmTree::fit(&ds, &cfg, &Executor::sequential()).unwrap();
        let correct = (0..4)
            .filter(|&i| tree.predict(ds.row(i)).unwrap() == Prediction::Class(ds.labels().unwrap()[i]))
            .count();
        assert!(correct < 4);
    }

    #[test]
    fn boundary_goes_right() {
        let h = Hyperplane {
            dims: vec![0, 1],
            coeffs: vec![0.6, 0.8],
            threshold: 1.4,
        };
        assert!(h.goes_right(&[1.0, 1.0]));
        assert!(!h.goes_right(&[1.0, 0.99]));
        let node = SplitNode {
            splits: vec![h],
            children: vec![],
            n_samples: 0,
            impurity: 0.0,
            loss: 0.0,
        };
        assert_eq!(node.route(&[1.0, 1.0]), 0);
        assert_eq!(node.route(&[0.0, 0.0]), 1);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let tree = SlmTree::fit(&xor(), &small_cfg(SearchMode::Apso), &Executor::sequential()).unwrap();
        assert!(matches!(
            tree.predict(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn regression_leaves_hold_means() {
        let ds = generate("friedman1", 200, 0.0, 3).unwrap();
        let cfg = TreeConfig {
            max_depth: 3,
            ..TreeConfig::default()
        };
        let tree = SlmTree::fit(&ds, &cfg, &Executor::sequential()).unwrap();
        assert!(tree.depth() <= 3);
        assert!(matches!(tree.predict(ds.row(0)).unwrap(), Prediction::Value(_)));
        assert!(tree.predict_proba(ds.row(0)).is_err());
    }

    #[test]
    fn multiway_children_partition_samples() {
        let ds = generate("moons-4", 400, 0.1, 5).unwrap();
        let cfg = TreeConfig {
            search: SearchMode::Probabilistic,
            prob: ProbSearchParams {
                keep: 3,
                candidates: 200,
                cos_max: 0.9,
                ..ProbSearchParams::default()
            },
            max_depth: 3,
            ..TreeConfig::default()
        };
        let tree = SlmTree::fit(&ds, &cfg, &Executor::sequential()).unwrap();
        let Node::Split(root) = &tree.root else {
            panic!("root should split")
        };
        assert!(root.children.len() >= 2);
        assert_eq!(root.children.len(), root.splits.len() + 1);
        let total: usize = root.children.iter().map(Node::n_samples).sum();
        assert_eq!(total, 400);
    }

    #[test]
    fn invalid_config() {
        let bad = TreeConfig {
            min_split: 3,
            min_leaf: 2,
            ..TreeConfig::default()
        };
        assert!(SlmTree::fit(&xor(), &bad, &Executor::sequential()).is_err());
        assert!(SlmTree::build(&xor(), &[], &TreeConfig::default(), &Executor::sequential()).is_err());
    }

    #[test]
    fn seeds_differ_per_salt() {
        assert_ne!(mix_seed(1, 1), mix_seed(1, 2));
        assert_ne!(mix_seed(1, 1), mix_seed(2, 1));
    }
}
