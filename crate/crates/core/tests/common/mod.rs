//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slm::dft::TargetView;
use slm::{load_csv, Dataset, Task};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Loads `data/<name>.csv`; `None` when the file is absent.
pub fn load_data(name: &str, task: Task) -> Option<Dataset> {
    let path = data_dir().join(format!("{name}.csv"));
    if !path.exists() {
        return None;
    }
    let target = if task == Task::Classification { "class" } else { "target" };
    Some(load_csv(&path, target, task).expect("bundled csv loads"))
}

#[derive(Clone, Debug)]
pub enum OracleTargets {
    Classes(Vec<usize>, usize),
    Values(Vec<f64>),
}

impl OracleTargets {
    pub fn view(&self) -> TargetView<'_> {
        match self {
            OracleTargets::Classes(l, c) => TargetView::Classes {
                labels: l,
                n_classes: *c,
            },
            OracleTargets::Values(v) => TargetView::Values(v),
        }
    }
}

fn side_loss(targets: &OracleTargets, idx: &[usize]) -> f64 {
    if idx.is_empty() {
        return 0.0;
    }
    let n = idx.len() as f64;
    match targets {
        OracleTargets::Classes(labels, c) => {
            let mut counts = vec![0.0; *c];
            for &i in idx {
                counts[labels[i]] += 1.0;
            }
            counts
                .iter()
                .filter(|&&k| k > 0.0)
                .map(|&k| {
                    let p = k / n;
                    -p * p.log2()
                })
                .sum()
        }
        OracleTargets::Values(v) => {
            let mean = idx.iter().map(|&i| v[i]).sum::<f64>() / n;
            idx.iter().map(|&i| (v[i] - mean).powi(2)).sum::<f64>() / n
        }
    }
}

/// Exhaustive threshold search: every interior edge of a uniform `bins`
/// grid over the value range is tried by explicitly partitioning the
/// samples. Returns `(threshold, loss)`, or `None` when no edge is admissible.
pub fn oracle_best_split(
    values: &[f64],
    targets: &OracleTargets,
    bins: usize,
    min_leaf: usize,
) -> Option<(f64, f64)> {
    let min_leaf = min_leaf.max(1);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo < hi) {
        return None;
    }
    let n = values.len() as f64;
    let mut scored = Vec::new();
    for k in 1..bins {
        let t = lo + (hi - lo) * (k as f64 / bins as f64);
        let right: Vec<usize> = (0..values.len()).filter(|&i| values[i] >= t).collect();
        let left: Vec<usize> = (0..values.len()).filter(|&i| values[i] < t).collect();
        if left.len() < min_leaf || right.len() < min_leaf {
            continue;
        }
        let loss = left.len() as f64 / n * side_loss(targets, &left)
            + right.len() as f64 / n * side_loss(targets, &right);
        scored.push((t, loss));
    }
    let min = scored.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * min.abs().max(1.0);
    scored
        .into_iter()
        .filter(|s| s.1 <= min + tol)
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub values: Vec<f64>,
    pub targets: OracleTargets,
    pub bins: usize,
    pub min_leaf: usize,
}

/// Random instance with N <= 64 and bins <= 32. Values are drawn from a
/// coarse grid half of the time so that ties and empty bins are common.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=64);
    let bins = rng.random_range(2..=32);
    let min_leaf = rng.random_range(1..=4);
    let coarse = rng.random::<bool>();
    let values = (0..n)
        .map(|_| {
            if coarse {
                rng.random_range(0..8) as f64 * 0.25
            } else {
                rng.random_range(-10.0..10.0)
            }
        })
        .collect();
    let targets = if rng.random_bool(0.6) {
        let c = rng.random_range(2..=4);
        OracleTargets::Classes((0..n).map(|_| rng.random_range(0..c)).collect(), c)
    } else {
        OracleTargets::Values((0..n).map(|_| rng.random_range(0.0..5.0)).collect())
    };
    Instance {
        values,
        targets,
        bins,
        min_leaf,
    }
}

/// `Ok(())` when `best_split` agrees with the oracle on `inst`.
pub fn check_instance(inst: &Instance) -> Result<(), String> {
    let p = slm::dft::Projected1D::new(inst.values.clone(), inst.targets.view())
        .map_err(|e| e.to_string())?;
    let rec = slm::dft::best_split(&p, inst.bins, inst.min_leaf).map_err(|e| e.to_string())?;
    match oracle_best_split(&inst.values, &inst.targets, inst.bins, inst.min_leaf) {
        None if rec.degenerate => Ok(()),
        None => Err(format!("oracle degenerate, got {rec:?}")),
        Some((t, loss)) => {
            if rec.degenerate {
                return Err(format!("oracle found ({t}, {loss}), got degenerate"));
            }
            if rec.threshold.to_bits() != t.to_bits() || (rec.loss - loss).abs() > 1e-12 {
                return Err(format!("oracle ({t}, {loss}) vs ({}, {})", rec.threshold, rec.loss));
            }
            Ok(())
        }
    }
}
