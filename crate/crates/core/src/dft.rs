//! Discriminant feature test (DFT).
//!
//! A 1D projection of the node's samples is scored by the lowest weighted
//! child impurity over a fixed grid of candidate thresholds: Shannon entropy
//! (bits) for classification, mean squared error around each side's mean for
//! regression. The grid is the `bins - 1` interior edges of a uniform
//! partition of `[min, max]` of the projected values.
//!
//! Scoring many projections is the hot loop of tree construction and is the
//! only place (together with swarm evaluation) that fans out to the worker
//! pool; see [`evaluate_candidates`].

use crate::dataset::{Dataset, Targets};
use crate::error::{Error, Result};
use crate::exec::Executor;

pub const DEFAULT_BINS: usize = 32;

/// Two losses closer than this (relative to the smaller, floor 1) are a tie.
///
/// Ties resolve to the smallest threshold. The tolerance makes the choice
/// independent of last-bit differences between algebraically equal losses.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Borrowed targets aligned with a set of samples.
#[derive(Clone, Copy, Debug)]
pub enum TargetView<'a> {
    Classes { labels: &'a [usize], n_classes: usize },
    Values(&'a [f64]),
}

impl<'a> TargetView<'a> {
    pub fn of(targets: &'a Targets) -> Self {
        match targets {
            Targets::Classes { labels, names } => TargetView::Classes {
                labels,
                n_classes: names.len(),
            },
            Targets::Values(v) => TargetView::Values(v),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            TargetView::Classes { labels, .. } => labels.len(),
            TargetView::Values(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Targets gathered for a subset of rows; owns its storage.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum OwnedTargets {
    Classes { labels: Vec<usize>, n_classes: usize },
    Values(Vec<f64>),
}

impl OwnedTargets {
    pub(crate) fn gather(targets: &Targets, rows: &[usize]) -> Self {
        match targets {
            Targets::Classes { labels, names } => OwnedTargets::Classes {
                labels: rows.iter().map(|&r| labels[r]).collect(),
                n_classes: names.len(),
            },
            Targets::Values(v) => OwnedTargets::Values(rows.iter().map(|&r| v[r]).collect()),
        }
    }

    pub(crate) fn view(&self) -> TargetView<'_> {
        match self {
            OwnedTargets::Classes { labels, n_classes } => TargetView::Classes {
                labels,
                n_classes: *n_classes,
            },
            OwnedTargets::Values(v) => TargetView::Values(v),
        }
    }
}

/// Projected values `a^T x` of a set of samples together with their targets.
#[derive(Clone, Debug)]
pub struct Projected1D<'a> {
    values: Vec<f64>,
    targets: TargetView<'a>,
}

impl<'a> Projected1D<'a> {
    pub fn new(values: Vec<f64>, targets: TargetView<'a>) -> Result<Self> {
        if values.len() != targets.len() {
            return Err(Error::invalid(
                "values",
                format!("{} values for {} targets", values.len(), targets.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "projected values must be finite"));
        }
        Ok(Self { values, targets })
    }

    /// Callers guarantee matching lengths and finite values.
    pub(crate) fn new_unchecked(values: Vec<f64>, targets: TargetView<'a>) -> Self {
        debug_assert_eq!(values.len(), targets.len());
        Self { values, targets }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn targets(&self) -> TargetView<'a> {
        self.targets
    }
}

/// Outcome of a threshold search on one projection.
///
/// Samples with `value >= threshold` form the right side. A degenerate
/// record carries the no-split impurity as its loss and no usable threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitRecord {
    pub threshold: f64,
    pub loss: f64,
    pub left_count: usize,
    pub right_count: usize,
    pub degenerate: bool,
}

impl SplitRecord {
    fn degenerate(loss: f64, n: usize) -> Self {
        Self {
            threshold: 0.0,
            loss,
            left_count: n,
            right_count: 0,
            degenerate: true,
        }
    }
}

/// Per-dimension DFT losses and the dimensions sorted by ascending loss.
#[derive(Clone, Debug, PartialEq)]
pub struct DftRanking {
    losses: Vec<f64>,
    order: Vec<usize>,
}

impl DftRanking {
    /// Sorts ascending by loss, equal losses by dimension index.
    pub fn from_losses(losses: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..losses.len()).collect();
        order.sort_by(|&a, &b| losses[a].total_cmp(&losses[b]).then(a.cmp(&b)));
        Self { losses, order }
    }

    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    /// `order()[k]` is the raw dimension with the `k`-th lowest loss.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Ranking restricted to the `n` most discriminant dimensions, re-indexed
    /// so that position `k` refers to `order()[k]` of `self`.
    pub fn top(&self, n: usize) -> DftRanking {
        let n = n.min(self.len());
        DftRanking {
            losses: self.order[..n].iter().map(|&d| self.losses[d]).collect(),
            order: (0..n).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Impurity
// ---------------------------------------------------------------------------

fn entropy_bits(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        // Starting from +0 keeps a pure side at 0 rather than -0.
        .fold(0.0, |acc, h| acc + h)
}

/// Running count, mean and sum of squared deviations.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let (na, nb, nf) = (self.n as f64, other.n as f64, n as f64);
        Moments {
            n,
            mean: self.mean + delta * nb / nf,
            m2: self.m2 + other.m2 + delta * delta * na * nb / nf,
        }
    }
}

fn class_counts(labels: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0; n_classes];
    for &l in labels {
        counts[l] += 1;
    }
    counts
}

/// Impurity of an unsplit sample set: entropy in bits or MSE around the mean.
pub fn impurity(targets: TargetView<'_>) -> f64 {
    match targets {
        TargetView::Classes { labels, n_classes } => {
            entropy_bits(&class_counts(labels, n_classes), labels.len())
        }
        TargetView::Values(v) => {
            let mut m = Moments::default();
            v.iter().for_each(|&x| m.push(x));
            if m.n == 0 {
                0.0
            } else {
                (m.m2 / m.n as f64).max(0.0)
            }
        }
    }
}

/// Weighted impurity of a binary split: `N_L/N * I(left) + N_R/N * I(right)`.
///
/// An empty side has weight zero.
pub fn dft_loss(left: TargetView<'_>, right: TargetView<'_>) -> Result<f64> {
    let (nl, nr) = (left.len(), right.len());
    if nl + nr == 0 {
        return Err(Error::EmptyInput("both sides of the split are empty"));
    }
    let n = (nl + nr) as f64;
    match (left, right) {
        (TargetView::Classes { .. }, TargetView::Classes { .. })
        | (TargetView::Values(_), TargetView::Values(_)) => {
            Ok((nl as f64 / n) * impurity(left) + (nr as f64 / n) * impurity(right))
        }
        _ => Err(Error::TaskMismatch(
            "left and right targets must be of the same kind",
        )),
    }
}

// ---------------------------------------------------------------------------
// Threshold search
// ---------------------------------------------------------------------------

/// Interior edges of `bins` equal-width bins over `[lo, hi]`.
pub fn candidate_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let width = hi - lo;
    (1..bins)
        .map(|k| lo + width * (k as f64 / bins as f64))
        .collect()
}

/// Index of the first loss within [`TIE_TOLERANCE`] of the minimum.
pub(crate) fn first_minimum(losses: impl Iterator<Item = (usize, f64)> + Clone) -> Option<usize> {
    let min = losses.clone().map(|(_, l)| l).fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return None;
    }
    let tol = TIE_TOLERANCE * min.abs().max(1.0);
    losses.into_iter().find(|&(_, l)| l <= min + tol).map(|(i, _)| i)
}

/// Finds the candidate threshold with the lowest [`dft_loss`].
///
/// Thresholds leaving fewer than `min_leaf` samples (at least one) on either
/// side are skipped. When none remains, or all values are equal, the record
/// is degenerate.
pub fn best_split(p: &Projected1D<'_>, bins: usize, min_leaf: usize) -> Result<SplitRecord> {
    let n = p.values.len();
    if n == 0 {
        return Err(Error::EmptyInput("projection has no samples"));
    }
    if bins < 2 {
        return Err(Error::invalid("bins", "at least 2 bins are required"));
    }
    let min_leaf = min_leaf.max(1);
    let parent = impurity(p.targets);
    if n < 2 * min_leaf {
        return Ok(SplitRecord::degenerate(parent, n));
    }
    let (lo, hi) = p
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if lo >= hi {
        return Ok(SplitRecord::degenerate(parent, n));
    }
    let edges = candidate_edges(lo, hi, bins);
    // Bin b holds values v with exactly b edges <= v, so edge j separates
    // bins 0..=j (left) from bins j+1.. (right), matching `v >= edge`.
    let bin_of = |v: f64| edges.partition_point(|&e| e <= v);

    // (edge index, left count, loss) for every admissible edge.
    let scored: Vec<(usize, usize, f64)> = match p.targets {
        TargetView::Classes { labels, n_classes } => {
            let mut hist = vec![0usize; bins * n_classes];
            for (&v, &l) in p.values.iter().zip(labels) {
                hist[bin_of(v) * n_classes + l] += 1;
            }
            let total = class_counts(labels, n_classes);
            let mut left = vec![0usize; n_classes];
            let mut right = vec![0usize; n_classes];
            let mut n_left = 0;
            let mut out = Vec::with_capacity(edges.len());
            for j in 0..edges.len() {
                for c in 0..n_classes {
                    left[c] += hist[j * n_classes + c];
                    n_left += hist[j * n_classes + c];
                }
                let n_right = n - n_left;
                if n_left < min_leaf || n_right < min_leaf {
                    continue;
                }
                for c in 0..n_classes {
                    right[c] = total[c] - left[c];
                }
                let nf = n as f64;
                let loss = (n_left as f64 / nf) * entropy_bits(&left, n_left)
                    + (n_right as f64 / nf) * entropy_bits(&right, n_right);
                out.push((j, n_left, loss));
            }
            out
        }
        TargetView::Values(targets) => {
            let mut hist = vec![Moments::default(); bins];
            for (&v, &y) in p.values.iter().zip(targets) {
                hist[bin_of(v)].push(y);
            }
            // suffix[j] summarises bins j..
            let mut suffix = vec![Moments::default(); bins + 1];
            for b in (0..bins).rev() {
                suffix[b] = hist[b].merge(suffix[b + 1]);
            }
            let mut left = Moments::default();
            let mut out = Vec::with_capacity(edges.len());
            for j in 0..edges.len() {
                left = left.merge(hist[j]);
                let right = suffix[j + 1];
                if left.n < min_leaf || right.n < min_leaf {
                    continue;
                }
                // (N_L * MSE_L + N_R * MSE_R) / N
                let loss = ((left.m2 + right.m2) / n as f64).max(0.0);
                out.push((j, left.n, loss));
            }
            out
        }
    };

    let best = first_minimum(scored.iter().enumerate().map(|(k, s)| (k, s.2)));
    Ok(match best {
        None => SplitRecord::degenerate(parent, n),
        Some(k) => {
            let (j, n_left, loss) = scored[k];
            SplitRecord {
                threshold: edges[j],
                loss,
                left_count: n_left,
                right_count: n - n_left,
                degenerate: false,
            }
        }
    })
}

/// Scores every raw dimension of `rows` and sorts them by discriminant power.
pub fn rank_dimensions(
    ds: &Dataset,
    rows: &[usize],
    bins: usize,
    min_leaf: usize,
) -> Result<DftRanking> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("row set"));
    }
    let targets = OwnedTargets::gather(ds.targets(), rows);
    let mut losses = Vec::with_capacity(ds.n_features());
    for d in 0..ds.n_features() {
        let values = rows.iter().map(|&r| ds.value(r, d)).collect();
        let p = Projected1D::new_unchecked(values, targets.view());
        losses.push(best_split(&p, bins, min_leaf)?.loss);
    }
    Ok(DftRanking::from_losses(losses))
}

/// [`best_split`] over a list of projections, possibly in parallel.
///
/// The output is element-wise identical to a sequential map and does not
/// depend on the number of workers in `exec`.
pub fn evaluate_candidates(
    exec: &Executor,
    projections: &[Projected1D<'_>],
    bins: usize,
    min_leaf: usize,
) -> Result<Vec<SplitRecord>> {
    if projections.is_empty() {
        return Err(Error::EmptyInput("candidate list"));
    }
    exec.map(projections.len(), |i| best_split(&projections[i], bins, min_leaf))
        .into_iter()
        .collect()
}

/// Like [`evaluate_candidates`], but builds each projection inside its task
/// so the projection work itself is spread over the workers.
pub fn evaluate_generated<'t, F>(
    exec: &Executor,
    count: usize,
    bins: usize,
    min_leaf: usize,
    make: F,
) -> Result<Vec<SplitRecord>>
where
    F: Fn(usize) -> Projected1D<'t> + Sync,
{
    if count == 0 {
        return Err(Error::EmptyInput("candidate list"));
    }
    exec.map(count, |i| best_split(&make(i), bins, min_leaf))
        .into_iter()
        .collect()
}
