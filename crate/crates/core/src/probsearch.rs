//! Probabilistic projection sampling and diversity pruning.
//!
//! Dimensions are visited from most to least discriminant. Rank `d` (1-based)
//! becomes eligible with probability `P_d = exp(-beta * (d - 1))`; the first
//! `max_terms` eligible ranks receive a non-zero integer coefficient drawn
//! from `±1..=±floor(A_d)` with `A_d = alpha0 * exp(-alpha * d)`. The integer
//! vector is then scaled to unit length.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dft::DftRanking;
use crate::error::{Error, Result};

const MAX_SAMPLING_ATTEMPTS: usize = 100;

/// Unit-norm coefficient vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionVector {
    coeffs: Vec<f64>,
}

impl ProjectionVector {
    /// Normalizes `coeffs` to unit L2 norm; fails for the zero vector.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid(
                "coeffs",
                "projection vector must be finite and non-zero",
            ));
        }
        Ok(Self {
            coeffs: coeffs.into_iter().map(|c| c / norm).collect(),
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn nonzero(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0.0).count()
    }

    pub fn cosine(&self, other: &ProjectionVector) -> f64 {
        // Both are unit vectors.
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbSearchParams {
    /// Coefficient range scale `alpha0`.
    pub alpha0: f64,
    /// Coefficient range decay `alpha`.
    pub alpha: f64,
    /// Selection probability decay `beta`.
    pub beta: f64,
    /// Maximum number of non-zero coefficients `R` (capped at the dimension).
    pub max_terms: usize,
    /// Projections sampled per node (`p`).
    pub candidates: usize,
    /// Projections kept per node (`q`).
    pub keep: usize,
    /// Largest |cosine| allowed between two kept projections.
    pub cos_max: f64,
}

impl Default for ProbSearchParams {
    fn default() -> Self {
        Self {
            alpha0: 10.0,
            alpha: 0.3,
            beta: 0.2,
            max_terms: 8,
            candidates: 512,
            keep: 1,
            cos_max: 0.9,
        }
    }
}

impl ProbSearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0.is_finite() && self.alpha0 > 0.0) {
            return Err(Error::invalid("alpha0", "must be > 0"));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::invalid("alpha", "must be >= 0"));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::invalid("beta", "must be >= 0"));
        }
        if self.max_terms == 0 {
            return Err(Error::invalid("max_terms", "must be >= 1"));
        }
        if self.candidates == 0 {
            return Err(Error::invalid("candidates", "must be >= 1"));
        }
        if self.keep == 0 || self.keep > self.candidates {
            return Err(Error::invalid("keep", "must lie in 1..=candidates"));
        }
        if !(self.cos_max > 0.0 && self.cos_max <= 1.0) {
            return Err(Error::invalid("cos_max", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// `floor(alpha0 * exp(-alpha * rank))` for a 1-based rank.
pub fn coefficient_range(rank: usize, params: &ProbSearchParams) -> u32 {
    let a = params.alpha0 * (-params.alpha * rank as f64).exp();
    a.floor().max(0.0) as u32
}

/// `exp(-beta * (rank - 1))` for a 1-based rank; the top rank always gets 1.
pub fn selection_probability(rank: usize, params: &ProbSearchParams) -> f64 {
    let p = (-params.beta * (rank.saturating_sub(1)) as f64).exp();
    if p.is_nan() {
        // beta = inf at rank 1
        1.0
    } else {
        p
    }
}

/// Draws one projection vector over the dimensions of `ranking`.
///
/// The returned vector has `ranking.len()` entries indexed by raw dimension
/// (i.e. rank positions are mapped back through `ranking.order()`).
pub fn sample_projection<R: Rng + ?Sized>(
    ranking: &DftRanking,
    params: &ProbSearchParams,
    rng: &mut R,
) -> Result<ProjectionVector> {
    let dim = ranking.len();
    if dim == 0 {
        return Err(Error::EmptyInput("ranking"));
    }
    let max_terms = params.max_terms.clamp(1, dim);
    let mut coeffs = vec![0.0; dim];
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        coeffs.iter_mut().for_each(|c| *c = 0.0);
        let mut kept = 0;
        for (pos, &raw) in ranking.order().iter().enumerate() {
            if kept == max_terms {
                break;
            }
            let rank = pos + 1;
            let p = selection_probability(rank, params);
            if p < 1.0 && rng.random::<f64>() >= p {
                continue;
            }
            kept += 1;
            let range = coefficient_range(rank, params) as i64;
            if range >= 1 {
                // Uniform over {-range..=range} \ {0}.
                let k = rng.random_range(1..=range);
                let sign = if rng.random::<bool>() { 1 } else { -1 };
                coeffs[raw] = (sign * k) as f64;
            }
        }
        if coeffs.iter().any(|&c| c != 0.0) {
            return ProjectionVector::new(coeffs);
        }
    }
    Err(Error::DegenerateSampling(MAX_SAMPLING_ATTEMPTS))
}

/// Greedy diversity filter.
///
/// Visits candidates by ascending loss (ties by index) and accepts one when
/// its |cosine| with every already accepted vector is at most `cos_max`.
/// Returns the indices of accepted candidates in acceptance order; the
/// lowest-loss candidate is always first.
pub fn select_diverse(
    candidates: &[(ProjectionVector, f64)],
    keep: usize,
    cos_max: f64,
) -> Vec<usize> {
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        candidates[a]
            .1
            .total_cmp(&candidates[b].1)
            .then(a.cmp(&b))
    });
    let mut accepted: Vec<usize> = Vec::with_capacity(keep);
    for i in order {
        if accepted.len() == keep.max(1) {
            break;
        }
        let v = &candidates[i].0;
        if accepted
            .iter()
            .all(|&j| v.cosine(&candidates[j].0).abs() <= cos_max)
        {
            accepted.push(i);
        }
    }
    accepted
}
