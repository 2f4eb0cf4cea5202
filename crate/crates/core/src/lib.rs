//! Subspace learning machines: decision trees that split on learned 1D
//! projections `a^T x` of the feature space.
//!
//! Classification trees (SLM) minimize weighted entropy; regression trees
//! (SLR) minimize weighted MSE. The projection at each node is found either
//! by probabilistic sampling of sparse integer coefficient vectors or by an
//! adaptive particle swarm. Bagged and boosted ensembles are built on top.
//!
//! ```
//! use slm::{generate, split, Executor, Model, SlmTree, SplitSpec, TreeConfig};
//!
//! let ds = generate("moons-2", 400, 0.1, 7)?;
//! let (train, test) = split(&ds, SplitSpec::default())?;
//! let tree = SlmTree::fit(&train, &TreeConfig::default(), &Executor::sequential())?;
//! let accuracy = Model::from(tree).evaluate(&test)?.value();
//! assert!(accuracy > 0.9);
//! # Ok::<(), slm::Error>(())
//! ```

pub mod dataset;
pub mod dft;
pub mod ensemble;
mod error;
pub mod exec;
pub mod model;
pub mod probsearch;
pub mod pso;
pub mod tree;

pub use dataset::{
    generate, load_csv, save_csv, split, split_indices, Dataset, DatasetId, SplitSpec, Targets,
    Task,
};
pub use ensemble::{fit_boost, fit_forest, BoostConfig, BoostModel, ForestConfig, ForestModel};
pub use error::{Error, Result};
pub use exec::Executor;
pub use model::{Metric, Model};
pub use probsearch::ProbSearchParams;
pub use pso::{optimize, SwarmConfig};
pub use tree::{Prediction, SearchMode, SlmTree, SwarmParams, TreeConfig};

// Runs the guide's snippets as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/datasets.md")]
    mod datasets {}
    #[doc = include_str!("../../../book/src/splits.md")]
    mod splits {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/trees.md")]
    mod trees {}
    #[doc = include_str!("../../../book/src/ensembles.md")]
    mod ensembles {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/determinism.md")]
    mod determinism {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
