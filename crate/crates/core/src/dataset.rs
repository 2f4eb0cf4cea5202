//! Tabular datasets: construction, synthetic generators, CSV I/O and
//! deterministic train/test splitting.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classification,
    Regression,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Classification => "classification",
            Task::Regression => "regression",
        })
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classification" => Ok(Task::Classification),
            "regression" => Ok(Task::Regression),
            other => Err(Error::invalid(
                "task",
                format!("expected `classification` or `regression`, got `{other}`"),
            )),
        }
    }
}

/// Per-row targets.
///
/// Class labels are indices into `names`; a dataset produced by
/// [`Dataset::subset`] keeps the full class list even if some classes no
/// longer occur.
#[derive(Clone, Debug, PartialEq)]
pub enum Targets {
    Classes { labels: Vec<usize>, names: Vec<String> },
    Values(Vec<f64>),
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Classes { labels, .. } => labels.len(),
            Targets::Values(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn task(&self) -> Task {
        match self {
            Targets::Classes { .. } => Task::Classification,
            Targets::Values(_) => Task::Regression,
        }
    }

    fn select(&self, rows: &[usize]) -> Targets {
        match self {
            Targets::Classes { labels, names } => Targets::Classes {
                labels: rows.iter().map(|&r| labels[r]).collect(),
                names: names.clone(),
            },
            Targets::Values(v) => Targets::Values(rows.iter().map(|&r| v[r]).collect()),
        }
    }
}

/// Immutable row-major feature matrix with one target per row.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Arc<Vec<f64>>,
    n_features: usize,
    feature_names: Vec<String>,
    target_name: String,
    targets: Targets,
}

impl Dataset {
    /// Builds a dataset from a row-major matrix.
    ///
    /// Rejects empty matrices, non-finite values, mismatched lengths and
    /// class labels outside `0..names.len()`.
    pub fn new(
        features: Vec<f64>,
        n_features: usize,
        feature_names: Vec<String>,
        target_name: impl Into<String>,
        targets: Targets,
    ) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::InvalidDataset("at least one feature is required".into()));
        }
        if features.is_empty() {
            return Err(Error::InvalidDataset("at least one row is required".into()));
        }
        if features.len() % n_features != 0 {
            return Err(Error::InvalidDataset(format!(
                "{} values do not form rows of {n_features} features",
                features.len()
            )));
        }
        let n_rows = features.len() / n_features;
        if feature_names.len() != n_features {
            return Err(Error::InvalidDataset(format!(
                "{} feature names for {n_features} features",
                feature_names.len()
            )));
        }
        if targets.len() != n_rows {
            return Err(Error::InvalidDataset(format!(
                "{} targets for {n_rows} rows",
                targets.len()
            )));
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite feature value at row {}, column {}",
                pos / n_features,
                pos % n_features
            )));
        }
        match &targets {
            Targets::Classes { labels, names } => {
                if names.is_empty() {
                    return Err(Error::InvalidDataset("no class names".into()));
                }
                if let Some(&bad) = labels.iter().find(|&&l| l >= names.len()) {
                    return Err(Error::InvalidDataset(format!(
                        "label {bad} outside 0..{}",
                        names.len()
                    )));
                }
            }
            Targets::Values(values) => {
                if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
                    return Err(Error::InvalidDataset(format!(
                        "non-finite target at row {pos}"
                    )));
                }
            }
        }
        Ok(Self {
            features: Arc::new(features),
            n_features,
            feature_names,
            target_name: target_name.into(),
            targets,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.targets.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn task(&self) -> Task {
        self.targets.task()
    }

    pub fn targets(&self) -> &Targets {
        &self.targets
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    /// Number of classes, or `None` for regression.
    pub fn n_classes(&self) -> Option<usize> {
        match &self.targets {
            Targets::Classes { names, .. } => Some(names.len()),
            Targets::Values(_) => None,
        }
    }

    pub fn class_names(&self) -> Option<&[String]> {
        match &self.targets {
            Targets::Classes { names, .. } => Some(names),
            Targets::Values(_) => None,
        }
    }

    pub fn labels(&self) -> Option<&[usize]> {
        match &self.targets {
            Targets::Classes { labels, .. } => Some(labels),
            Targets::Values(_) => None,
        }
    }

    pub fn values(&self) -> Option<&[f64]> {
        match &self.targets {
            Targets::Values(v) => Some(v),
            Targets::Classes { .. } => None,
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    #[inline]
    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.features[row * self.n_features + feature]
    }

    /// Copies the selected rows (duplicates allowed) into a new dataset.
    pub fn subset(&self, rows: &[usize]) -> Result<Dataset> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("row subset"));
        }
        let mut features = Vec::with_capacity(rows.len() * self.n_features);
        for &r in rows {
            features.extend_from_slice(self.row(r));
        }
        Ok(Dataset {
            features: Arc::new(features),
            n_features: self.n_features,
            feature_names: self.feature_names.clone(),
            target_name: self.target_name.clone(),
            targets: self.targets.select(rows),
        })
    }

    /// Same feature matrix (shared, not copied) with real-valued targets.
    pub fn with_regression_targets(&self, values: Vec<f64>) -> Result<Dataset> {
        if values.len() != self.n_rows() {
            return Err(Error::InvalidDataset(format!(
                "{} targets for {} rows",
                values.len(),
                self.n_rows()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("non-finite target".into()));
        }
        Ok(Dataset {
            features: Arc::clone(&self.features),
            n_features: self.n_features,
            feature_names: self.feature_names.clone(),
            target_name: self.target_name.clone(),
            targets: Targets::Values(values),
        })
    }

    /// Re-encodes class labels so that label `i` means `names[i]`.
    ///
    /// Needed when a CSV written from a subset is read back: its labels are
    /// encoded from the rows present, not from the original class list.
    pub fn with_class_names(&self, names: &[String]) -> Result<Dataset> {
        let Targets::Classes {
            labels,
            names: current,
        } = &self.targets
        else {
            return Err(Error::TaskMismatch("class names need classification targets"));
        };
        let index: HashMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let remap = current
            .iter()
            .map(|n| {
                index.get(n.as_str()).copied().ok_or_else(|| {
                    Error::InvalidDataset(format!("class `{n}` is not one of {names:?}"))
                })
            })
            .collect::<Result<Vec<usize>>>()?;
        Ok(Dataset {
            features: Arc::clone(&self.features),
            n_features: self.n_features,
            feature_names: self.feature_names.clone(),
            target_name: self.target_name.clone(),
            targets: Targets::Classes {
                labels: labels.iter().map(|&l| remap[l]).collect(),
                names: names.to_vec(),
            },
        })
    }
}

// ---------------------------------------------------------------------------
// Synthetic generators
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DatasetId {
    CircleAndRing,
    Moons2,
    Moons4,
    Friedman1,
    Friedman2,
    Friedman3,
}

impl DatasetId {
    pub const ALL: [DatasetId; 6] = [
        DatasetId::CircleAndRing,
        DatasetId::Moons2,
        DatasetId::Moons4,
        DatasetId::Friedman1,
        DatasetId::Friedman2,
        DatasetId::Friedman3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DatasetId::CircleAndRing => "circle-and-ring",
            DatasetId::Moons2 => "moons-2",
            DatasetId::Moons4 => "moons-4",
            DatasetId::Friedman1 => "friedman1",
            DatasetId::Friedman2 => "friedman2",
            DatasetId::Friedman3 => "friedman3",
        }
    }

    pub fn task(self) -> Task {
        match self {
            DatasetId::CircleAndRing | DatasetId::Moons2 | DatasetId::Moons4 => {
                Task::Classification
            }
            _ => Task::Regression,
        }
    }
}

impl fmt::Display for DatasetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DatasetId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownDataset(s.to_string()))
    }
}

/// Generates one of the built-in synthetic datasets.
///
/// The output depends only on the arguments. `noise` is the standard
/// deviation of additive Gaussian noise (on each coordinate for the 2D
/// classification sets, on the target for the Friedman sets).
pub fn generate(name: &str, n_samples: usize, noise: f64, seed: u64) -> Result<Dataset> {
    let id: DatasetId = name.parse()?;
    generate_id(id, n_samples, noise, seed)
}

pub fn generate_id(id: DatasetId, n_samples: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if n_samples < 10 {
        return Err(Error::invalid(
            "n_samples",
            format!("at least 10 samples required, got {n_samples}"),
        ));
    }
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(Error::invalid("noise", "must be a finite value >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match id {
        DatasetId::CircleAndRing => circle_and_ring(n_samples, noise, &mut rng),
        DatasetId::Moons2 => moons(n_samples, 1, noise, &mut rng),
        DatasetId::Moons4 => moons(n_samples, 2, noise, &mut rng),
        DatasetId::Friedman1 => friedman(1, n_samples, noise, &mut rng),
        DatasetId::Friedman2 => friedman(2, n_samples, noise, &mut rng),
        DatasetId::Friedman3 => friedman(3, n_samples, noise, &mut rng),
    }
}

fn gaussian(rng: &mut ChaCha8Rng, sd: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    sd * z
}

fn numbered_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn class_dataset(
    mut points: Vec<([f64; 2], usize)>,
    n_classes: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Dataset> {
    points.shuffle(rng);
    let features = points.iter().flat_map(|(p, _)| *p).collect();
    let labels = points.iter().map(|&(_, l)| l).collect();
    Dataset::new(
        features,
        2,
        numbered_names("x", 2),
        "class",
        Targets::Classes {
            labels,
            names: (0..n_classes).map(|c| c.to_string()).collect(),
        },
    )
}

/// Class sizes as even as possible, earlier classes taking the remainder.
fn class_sizes(n: usize, classes: usize) -> Vec<usize> {
    (0..classes)
        .map(|c| n / classes + usize::from(c < n % classes))
        .collect()
}

fn circle_and_ring(n: usize, noise: f64, rng: &mut ChaCha8Rng) -> Result<Dataset> {
    let sizes = class_sizes(n, 2);
    let mut points = Vec::with_capacity(n);
    // Disc of radius 0.5 (class 0), annulus 0.8..1.0 (class 1); uniform by area.
    for (label, &(r_in, r_out)) in [(0.0, 0.5), (0.8, 1.0)].iter().enumerate() {
        for _ in 0..sizes[label] {
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            let u: f64 = rng.random();
            let r = (r_in * r_in + u * (r_out * r_out - r_in * r_in)).sqrt();
            let x = r * theta.cos() + gaussian(rng, noise);
            let y = r * theta.sin() + gaussian(rng, noise);
            points.push(([x, y], label));
        }
    }
    class_dataset(points, 2, rng)
}

fn linspace(n: usize, i: usize) -> f64 {
    if n <= 1 {
        0.0
    } else {
        std::f64::consts::PI * i as f64 / (n - 1) as f64
    }
}

/// Interleaved half-moon pairs, pair `k` shifted up by `2k`.
fn moons(n: usize, pairs: usize, noise: f64, rng: &mut ChaCha8Rng) -> Result<Dataset> {
    let n_classes = 2 * pairs;
    let sizes = class_sizes(n, n_classes);
    let mut points = Vec::with_capacity(n);
    for (class, &size) in sizes.iter().enumerate() {
        let lift = 2.0 * (class / 2) as f64;
        let inner = class % 2 == 1;
        for i in 0..size {
            let t = linspace(size, i);
            let (x, y) = if inner {
                (1.0 - t.cos(), 1.0 - t.sin() - 0.5)
            } else {
                (t.cos(), t.sin())
            };
            let x = x + gaussian(rng, noise);
            let y = y + lift + gaussian(rng, noise);
            points.push(([x, y], class));
        }
    }
    class_dataset(points, n_classes, rng)
}

/// Friedman #1 target for a 10-feature row (only the first five matter).
pub fn friedman1_target(x: &[f64]) -> f64 {
    10.0 * (std::f64::consts::PI * x[0] * x[1]).sin()
        + 20.0 * (x[2] - 0.5).powi(2)
        + 10.0 * x[3]
        + 5.0 * x[4]
}

pub fn friedman2_target(x: &[f64]) -> f64 {
    (x[0].powi(2) + (x[1] * x[2] - 1.0 / (x[1] * x[3])).powi(2)).sqrt()
}

pub fn friedman3_target(x: &[f64]) -> f64 {
    ((x[1] * x[2] - 1.0 / (x[1] * x[3])) / x[0]).atan()
}

fn friedman(variant: u8, n: usize, noise: f64, rng: &mut ChaCha8Rng) -> Result<Dataset> {
    let d = if variant == 1 { 10 } else { 4 };
    let mut features = Vec::with_capacity(n * d);
    let mut targets = Vec::with_capacity(n);
    let mut row = vec![0.0; d];
    for _ in 0..n {
        for (j, v) in row.iter_mut().enumerate() {
            let u: f64 = rng.random();
            *v = match (variant, j) {
                (1, _) => u,
                (_, 0) => 100.0 * u,
                (_, 1) => 40.0 * std::f64::consts::PI + 520.0 * std::f64::consts::PI * u,
                (_, 2) => u,
                _ => 1.0 + 10.0 * u,
            };
        }
        let y = match variant {
            1 => friedman1_target(&row),
            2 => friedman2_target(&row),
            _ => friedman3_target(&row),
        };
        targets.push(y + gaussian(rng, noise));
        features.extend_from_slice(&row);
    }
    Dataset::new(
        features,
        d,
        numbered_names("x", d),
        "target",
        Targets::Values(targets),
    )
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Reads a comma-separated file with a header row.
///
/// Every column except `target_column` must be numeric. Class labels are
/// re-encoded to `0..C`: numerically when every label is an integer,
/// otherwise in order of first appearance.
pub fn load_csv(path: impl AsRef<Path>, target_column: &str, task: Task) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, target_column, task)
}

pub fn read_csv<R: Read>(reader: R, target_column: &str, task: Task) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyInput("csv file has no header"));
    }
    let target_idx = headers
        .iter()
        .position(|h| h.trim() == target_column)
        .ok_or_else(|| Error::MissingColumn(target_column.to_string()))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target_idx)
        .map(|(_, h)| h.trim().to_string())
        .collect();
    if feature_names.is_empty() {
        return Err(Error::InvalidDataset("no feature columns".into()));
    }

    let mut features = Vec::new();
    let mut raw_targets = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        for (i, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            if i == target_idx {
                raw_targets.push(cell.to_string());
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => features.push(v),
                _ => {
                    return Err(Error::NonNumeric {
                        column: headers[i].trim().to_string(),
                        line,
                        value: cell.to_string(),
                    })
                }
            }
        }
    }
    if raw_targets.is_empty() {
        return Err(Error::EmptyInput("csv file has no data rows"));
    }

    let targets = match task {
        Task::Classification => encode_labels(raw_targets),
        Task::Regression => {
            let mut values = Vec::with_capacity(raw_targets.len());
            for (row, cell) in raw_targets.into_iter().enumerate() {
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => values.push(v),
                    _ => {
                        return Err(Error::NonNumeric {
                            column: target_column.to_string(),
                            line: row as u64 + 2,
                            value: cell,
                        })
                    }
                }
            }
            Targets::Values(values)
        }
    };
    Dataset::new(
        features,
        feature_names.len(),
        feature_names,
        target_column,
        targets,
    )
}

fn encode_labels(raw: Vec<String>) -> Targets {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for s in &raw {
        if !index.contains_key(s) {
            index.insert(s.clone(), names.len());
            names.push(s.clone());
        }
    }
    let numeric: Option<Vec<i64>> = names.iter().map(|s| s.parse::<i64>().ok()).collect();
    if let Some(keys) = numeric {
        let mut order: Vec<usize> = (0..names.len()).collect();
        order.sort_by_key(|&i| keys[i]);
        names = order.iter().map(|&i| names[i].clone()).collect();
        index = names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    }
    let labels = raw.iter().map(|s| index[s]).collect();
    Targets::Classes { labels, names }
}

/// Writes the dataset as CSV with the target as the last column.
///
/// Values use the shortest representation that parses back to the same
/// bits, so [`read_csv`] reproduces the dataset exactly.
pub fn write_csv<W: Write>(ds: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().from_writer(writer);
    let mut header: Vec<&str> = ds.feature_names.iter().map(String::as_str).collect();
    header.push(&ds.target_name);
    wtr.write_record(&header)?;
    let mut record: Vec<String> = Vec::with_capacity(ds.n_features + 1);
    for i in 0..ds.n_rows() {
        record.clear();
        record.extend(ds.row(i).iter().map(|v| format!("{v:?}")));
        record.push(match &ds.targets {
            Targets::Classes { labels, names } => names[labels[i]].clone(),
            Targets::Values(v) => format!("{:?}", v[i]),
        });
        wtr.write_record(&record)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(ds, std::io::BufWriter::new(file))
}

// ---------------------------------------------------------------------------
// Train/test split
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            test_fraction: 0.2,
            seed: 0,
        }
    }
}

/// Row indices of a train/test partition, each sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Computes a seeded partition. Classification is stratified: each class
/// contributes `round(n_c * test_fraction)` rows to the test side.
pub fn split_indices(ds: &Dataset, spec: SplitSpec) -> Result<SplitIndices> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(Error::invalid("test_fraction", "must lie in (0, 1)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let groups: Vec<Vec<usize>> = match ds.targets() {
        Targets::Classes { labels, names } => {
            let mut groups = vec![Vec::new(); names.len()];
            for (i, &l) in labels.iter().enumerate() {
                groups[l].push(i);
            }
            groups
        }
        Targets::Values(v) => vec![(0..v.len()).collect()],
    };
    let mut train = Vec::new();
    let mut test = Vec::new();
    for mut group in groups {
        group.shuffle(&mut rng);
        let n_test = (group.len() as f64 * spec.test_fraction).round() as usize;
        test.extend_from_slice(&group[..n_test]);
        train.extend_from_slice(&group[n_test..]);
    }
    if train.is_empty() {
        return Err(Error::EmptyPartition("train"));
    }
    if test.is_empty() {
        return Err(Error::EmptyPartition("test"));
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices { train, test })
}

/// Splits a dataset into `(train, test)`.
pub fn split(ds: &Dataset, spec: SplitSpec) -> Result<(Dataset, Dataset)> {
    let idx = split_indices(ds, spec)?;
    Ok((ds.subset(&idx.train)?, ds.subset(&idx.test)?))
}
