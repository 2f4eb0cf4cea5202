//! Versioned JSON model documents.
//!
//! ```json
//! { "format": "slm-model", "version": 1, "model": { "kind": "tree", ... } }
//! ```
//!
//! Floats are written in shortest round-trip form, so a reloaded model
//! predicts bit-identically.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dataset::{Dataset, Task};
use crate::ensemble::{BoostModel, ForestModel};
use crate::error::{Error, Result};
use crate::tree::{Prediction, SlmTree};

pub const FORMAT_NAME: &str = "slm-model";
pub const FORMAT_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Model {
    Tree(SlmTree),
    Forest(ForestModel),
    Boost(BoostModel),
}

#[derive(Serialize)]
struct DocumentRef<'a> {
    format: &'static str,
    version: u64,
    model: &'a Model,
}

impl From<SlmTree> for Model {
    fn from(t: SlmTree) -> Self {
        Model::Tree(t)
    }
}

impl From<ForestModel> for Model {
    fn from(f: ForestModel) -> Self {
        Model::Forest(f)
    }
}

impl From<BoostModel> for Model {
    fn from(b: BoostModel) -> Self {
        Model::Boost(b)
    }
}

/// Accuracy in `[0, 1]` for classification, MSE for regression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Metric {
    Accuracy(f64),
    Mse(f64),
}

impl Metric {
    pub fn value(self) -> f64 {
        match self {
            Metric::Accuracy(v) | Metric::Mse(v) => v,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy(_) => "accuracy",
            Metric::Mse(_) => "mse",
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}={}", self.name(), self.value())
    }
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Tree(_) => "tree",
            Model::Forest(_) => "forest",
            Model::Boost(_) => "boost",
        }
    }

    pub fn task(&self) -> Task {
        match self {
            Model::Tree(m) => m.task,
            Model::Forest(m) => m.task,
            Model::Boost(m) => m.task,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Model::Tree(m) => m.n_features,
            Model::Forest(m) => m.n_features,
            Model::Boost(m) => m.n_features,
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        match self {
            Model::Tree(m) => m.predict(x),
            Model::Forest(m) => m.predict(x),
            Model::Boost(m) => m.predict(x),
        }
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Model::Tree(m) => m.predict_proba(x).map(<[f64]>::to_vec),
            Model::Forest(m) => m.predict_proba(x),
            Model::Boost(m) => m.predict_proba(x),
        }
    }

    /// Name of each class id; empty for regression.
    pub fn class_names(&self) -> &[String] {
        match self {
            Model::Tree(m) => &m.class_names,
            Model::Forest(m) => &m.class_names,
            Model::Boost(m) => &m.class_names,
        }
    }

    /// Predictions for every row of `ds`.
    pub fn predict_all(&self, ds: &Dataset) -> Result<Vec<Prediction>> {
        (0..ds.n_rows()).map(|i| self.predict(ds.row(i))).collect()
    }

    pub fn evaluate(&self, ds: &Dataset) -> Result<Metric> {
        if ds.task() != self.task() {
            return Err(Error::TaskMismatch("dataset and model tasks differ"));
        }
        if ds.n_rows() == 0 {
            return Err(Error::EmptyInput("evaluation rows"));
        }
        let predictions = self.predict_all(ds)?;
        let n = ds.n_rows() as f64;
        Ok(match (ds.labels(), ds.values()) {
            (Some(labels), _) => {
                let hits = labels
                    .iter()
                    .zip(&predictions)
                    .filter(|(&l, &p)| p == Prediction::Class(l))
                    .count();
                Metric::Accuracy(hits as f64 / n)
            }
            (None, Some(values)) => Metric::Mse(
                values
                    .iter()
                    .zip(&predictions)
                    .map(|(y, p)| (y - p.as_f64()).powi(2))
                    .sum::<f64>()
                    / n,
            ),
            (None, None) => unreachable!("dataset has targets"),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DocumentRef {
            format: FORMAT_NAME,
            version: FORMAT_VERSION,
            model: self,
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut doc: Value =
            serde_json::from_str(text).map_err(|e| Error::ModelFormat(e.to_string()))?;
        let obj = doc
            .as_object_mut()
            .ok_or_else(|| Error::ModelFormat("top level is not an object".into()))?;
        match obj.get("format").and_then(Value::as_str) {
            Some(FORMAT_NAME) => {}
            other => {
                return Err(Error::ModelFormat(format!(
                    "expected format `{FORMAT_NAME}`, found {other:?}"
                )))
            }
        }
        match obj.get("version").and_then(Value::as_u64) {
            Some(FORMAT_VERSION) => {}
            Some(v) => {
                return Err(Error::ModelFormat(format!(
                    "version {v} is not supported (expected {FORMAT_VERSION})"
                )))
            }
            None => return Err(Error::ModelFormat("missing version".into())),
        }
        let model = obj
            .remove("model")
            .ok_or_else(|| Error::ModelFormat("missing `model`".into()))?;
        serde_json::from_value(model).map_err(|e| Error::ModelFormat(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate;
    use crate::exec::Executor;
    use crate::tree::TreeConfig;

    fn small_tree() -> (Dataset, Model) {
        let ds = generate("circle-and-ring", 200, 0.05, 8).unwrap();
        let cfg = TreeConfig {
            max_depth: 4,
            ..TreeConfig::default()
        };
        let tree = SlmTree::fit(&ds, &cfg, &Executor::sequential()).unwrap();
        (ds, tree.into())
    }

    #[test]
    fn round_trip_is_exact() {
        let (ds, model) = small_tree();
        let json = model.to_json().unwrap();
        let back = Model::from_json(&json).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.to_json().unwrap(), json);
        assert_eq!(back.predict_all(&ds).unwrap(), model.predict_all(&ds).unwrap());
    }

    #[test]
    fn rejects_other_versions_and_garbage() {
        let (_, model) = small_tree();
        let json = model.to_json().unwrap();
        let bumped = json.replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(matches!(Model::from_json(&bumped), Err(Error::ModelFormat(_))));
        let renamed = json.replacen("slm-model", "other", 1);
        assert!(matches!(Model::from_json(&renamed), Err(Error::ModelFormat(_))));
        assert!(matches!(Model::from_json("{"), Err(Error::ModelFormat(_))));
        assert!(matches!(Model::from_json("[]"), Err(Error::ModelFormat(_))));
        let truncated = &json[..json.len() / 2];
        assert!(matches!(Model::from_json(truncated), Err(Error::ModelFormat(_))));
    }

    #[test]
    fn evaluate_checks_task() {
        let (_, model) = small_tree();
        let reg = generate("friedman1", 20, 0.0, 0).unwrap();
        assert!(matches!(model.evaluate(&reg), Err(Error::TaskMismatch(_))));
    }
}
