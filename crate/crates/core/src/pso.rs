//! Particle swarm optimization over a bounded box, with an optional adaptive
//! mode (evolutionary-state estimation, coefficient control and elite
//! learning).
//!
//! Random draws happen in a fixed order on the controller thread:
//!
//! 1. initialization, per particle: `dim` position draws, then `dim`
//!    velocity draws;
//! 2. per iteration, adaptive mode only: one `delta` draw for coefficient
//!    control;
//! 3. per iteration, per particle: `dim` draws of `r1`, then `dim` draws of
//!    `r2`;
//! 4. per iteration, adaptive mode in the convergence state: the elite
//!    coordinate index and one standard normal draw.
//!
//! Loss evaluations are the only work sent to the worker pool, and personal
//! and global bests are updated afterwards in particle order, so results do
//! not depend on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Executor;

pub const C_MIN: f64 = 1.5;
pub const C_MAX: f64 = 2.5;
pub const C_SUM_MAX: f64 = 4.0;
pub const SIGMA_MAX: f64 = 1.0;
pub const SIGMA_MIN: f64 = 0.1;
/// Improvements smaller than this do not reset the patience counter.
pub const STALL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub pbest_position: Vec<f64>,
    pub pbest_loss: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwarmConfig {
    pub population: usize,
    pub max_iter: usize,
    pub omega: f64,
    pub c1: f64,
    pub c2: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub vmax: f64,
    pub adaptive: bool,
    /// Stop after this many iterations without improvement.
    pub patience: Option<usize>,
    pub seed: u64,
}

impl SwarmConfig {
    /// Box `[lo, hi]^dim` with `vmax = 0.2 * (hi - lo)`, 30 particles, 200
    /// iterations and the constriction coefficients
    /// (`omega = 0.7298`, `c1 = c2 = 1.49618`).
    pub fn boxed(dim: usize, lo: f64, hi: f64) -> Self {
        Self {
            population: 30,
            max_iter: 200,
            omega: 0.7298,
            c1: 1.49618,
            c2: 1.49618,
            lower: vec![lo; dim],
            upper: vec![hi; dim],
            vmax: 0.2 * (hi - lo),
            adaptive: false,
            patience: None,
            seed: 0,
        }
    }

    /// Adaptive variant: starts from `omega = 0.9`, `c1 = c2 = 2`.
    pub fn adaptive(dim: usize, lo: f64, hi: f64) -> Self {
        Self {
            omega: 0.9,
            c1: 2.0,
            c2: 2.0,
            adaptive: true,
            ..Self::boxed(dim, lo, hi)
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::invalid("population", "at least 2 particles"));
        }
        if self.lower.is_empty() || self.lower.len() != self.upper.len() {
            return Err(Error::invalid("bounds", "lower and upper need the same non-zero length"));
        }
        if self
            .lower
            .iter()
            .zip(&self.upper)
            .any(|(l, u)| !(l.is_finite() && u.is_finite() && l < u))
        {
            return Err(Error::invalid("bounds", "each coordinate needs lower < upper"));
        }
        if !(self.vmax.is_finite() && self.vmax > 0.0) {
            return Err(Error::invalid("vmax", "must be > 0"));
        }
        if self.adaptive
            && !((C_MIN..=C_MAX).contains(&self.c1) && (C_MIN..=C_MAX).contains(&self.c2))
        {
            return Err(Error::invalid("c1/c2", "adaptive mode needs values in [1.5, 2.5]"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvoState {
    Exploration,
    Exploitation,
    Convergence,
    Jumpout,
}

/// Velocity and position update for one particle.
///
/// `v <- omega*v + c1*r1*(pbest - x) + c2*r2*(gbest - x)` per coordinate,
/// with one `r1[d]`, `r2[d]` pair per coordinate, clamped to
/// `[-vmax, vmax]`; then `x <- x + v` with the new velocity, clamped to the
/// box.
#[allow(clippy::too_many_arguments)]
pub fn step_particle(
    p: &mut Particle,
    gbest: &[f64],
    omega: f64,
    c1: f64,
    c2: f64,
    r1: &[f64],
    r2: &[f64],
    cfg: &SwarmConfig,
) {
    for d in 0..p.position.len() {
        let x = p.position[d];
        let v = omega * p.velocity[d]
            + c1 * r1[d] * (p.pbest_position[d] - x)
            + c2 * r2[d] * (gbest[d] - x);
        let v = v.clamp(-cfg.vmax, cfg.vmax);
        p.velocity[d] = v;
        p.position[d] = (x + v).clamp(cfg.lower[d], cfg.upper[d]);
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Position of the global-best particle within the spread of the swarm.
///
/// With `d_i` the mean distance of particle `i` to the others, returns
/// `(d_best - d_min) / (d_max - d_min)`, or 0 when all `d_i` are equal.
pub fn evolutionary_factor(positions: &[&[f64]], best: usize) -> f64 {
    let n = positions.len();
    if n < 2 {
        return 0.0;
    }
    let mean_dist: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| distance(positions[i], positions[j]))
                .sum::<f64>()
                / (n - 1) as f64
        })
        .collect();
    let (lo, hi) = mean_dist
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    if hi - lo <= 0.0 {
        0.0
    } else {
        ((mean_dist[best] - lo) / (hi - lo)).clamp(0.0, 1.0)
    }
}

pub fn classify_state(f: f64) -> EvoState {
    if f < 0.25 {
        EvoState::Convergence
    } else if f < 0.5 {
        EvoState::Exploitation
    } else if f < 0.75 {
        EvoState::Exploration
    } else {
        EvoState::Jumpout
    }
}

/// Inertia weight as a function of the evolutionary factor.
pub fn inertia(f: f64) -> f64 {
    1.0 / (1.0 + 1.5 * (-2.6 * f).exp())
}

/// State-dependent update of the acceleration coefficients for a given step
/// `delta`, followed by clamping to `[C_MIN, C_MAX]` and rescaling when
/// `c1 + c2` exceeds `C_SUM_MAX`.
pub fn adapt_coefficients_with(state: EvoState, c1: f64, c2: f64, delta: f64) -> (f64, f64) {
    let (d1, d2) = match state {
        EvoState::Exploration => (delta, -delta),
        EvoState::Exploitation => (0.5 * delta, -0.5 * delta),
        EvoState::Convergence => (0.5 * delta, 0.5 * delta),
        EvoState::Jumpout => (-delta, delta),
    };
    let c1 = (c1 + d1).clamp(C_MIN, C_MAX);
    let c2 = (c2 + d2).clamp(C_MIN, C_MAX);
    let sum = c1 + c2;
    if sum > C_SUM_MAX {
        (c1 * C_SUM_MAX / sum, c2 * C_SUM_MAX / sum)
    } else {
        (c1, c2)
    }
}

/// Draws `delta ~ U[0.05, 0.1]` and returns `(c1', c2', omega')`.
pub fn adapt_coefficients<R: Rng + ?Sized>(
    state: EvoState,
    c1: f64,
    c2: f64,
    f: f64,
    rng: &mut R,
) -> (f64, f64, f64) {
    let delta = rng.random_range(0.05..=0.1);
    let (c1, c2) = adapt_coefficients_with(state, c1, c2, delta);
    (c1, c2, inertia(f))
}

/// Standard deviation scale of elite learning, decaying linearly from
/// `SIGMA_MAX` at the first iteration to `SIGMA_MIN` at the last.
pub fn elite_sigma(iter: usize, max_iter: usize) -> f64 {
    if max_iter == 0 {
        return SIGMA_MAX;
    }
    let t = (iter as f64 / max_iter as f64).min(1.0);
    SIGMA_MAX - (SIGMA_MAX - SIGMA_MIN) * t
}

/// Copy of `gbest` with one random coordinate perturbed by Gaussian noise of
/// standard deviation `elite_sigma * width`, clamped to the box.
pub fn elite_learning<R: Rng + ?Sized>(
    gbest: &[f64],
    iter: usize,
    max_iter: usize,
    cfg: &SwarmConfig,
    rng: &mut R,
) -> Vec<f64> {
    let mut p = gbest.to_vec();
    let d = rng.random_range(0..p.len());
    let width = cfg.upper[d] - cfg.lower[d];
    let z: f64 = rng.sample(StandardNormal);
    p[d] = (p[d] + elite_sigma(iter, max_iter) * width * z).clamp(cfg.lower[d], cfg.upper[d]);
    p
}

#[derive(Clone, Debug)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    /// Loss at each particle's current position.
    pub current_loss: Vec<f64>,
    /// Index of the particle whose personal best is the global best.
    pub gbest_index: usize,
    pub gbest_position: Vec<f64>,
    pub gbest_loss: f64,
    pub iteration: usize,
    pub evo_state: EvoState,
    pub evo_factor: f64,
    pub omega: f64,
    pub c1: f64,
    pub c2: f64,
}

impl SwarmState {
    pub fn evolutionary_factor(&self) -> f64 {
        let positions: Vec<&[f64]> = self.particles.iter().map(|p| p.position.as_slice()).collect();
        evolutionary_factor(&positions, self.gbest_index)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwarmOutcome {
    pub best_position: Vec<f64>,
    pub best_loss: f64,
    /// Global best loss after initialization and after each iteration.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
}

/// A swarm driven one iteration at a time.
pub struct Swarm<'a, L> {
    cfg: &'a SwarmConfig,
    loss: &'a L,
    exec: &'a Executor,
    rng: ChaCha8Rng,
    state: SwarmState,
    evaluations: usize,
}

impl<'a, L> Swarm<'a, L>
where
    L: Fn(&[f64]) -> f64 + Sync,
{
    /// Places particles uniformly in the box and evaluates them.
    pub fn initialize(cfg: &'a SwarmConfig, loss: &'a L, exec: &'a Executor) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let dim = cfg.dim();
        let mut particles = Vec::with_capacity(cfg.population);
        for _ in 0..cfg.population {
            let position: Vec<f64> = (0..dim)
                .map(|d| cfg.lower[d] + rng.random::<f64>() * (cfg.upper[d] - cfg.lower[d]))
                .collect();
            let velocity: Vec<f64> = (0..dim)
                .map(|_| -cfg.vmax + rng.random::<f64>() * 2.0 * cfg.vmax)
                .collect();
            particles.push(Particle {
                pbest_position: position.clone(),
                position,
                velocity,
                pbest_loss: f64::INFINITY,
            });
        }
        let positions: Vec<&[f64]> = particles.iter().map(|p| p.position.as_slice()).collect();
        let losses = evaluate(exec, loss, &positions)?;
        let mut gbest_index = 0;
        for (i, (p, &l)) in particles.iter_mut().zip(&losses).enumerate() {
            p.pbest_loss = l;
            if i == 0 || l < losses[gbest_index] {
                gbest_index = i;
            }
        }
        let state = SwarmState {
            gbest_position: particles[gbest_index].pbest_position.clone(),
            gbest_loss: losses[gbest_index],
            gbest_index,
            particles,
            current_loss: losses,
            iteration: 0,
            evo_state: EvoState::Exploration,
            evo_factor: 0.0,
            omega: cfg.omega,
            c1: cfg.c1,
            c2: cfg.c2,
        };
        Ok(Self {
            cfg,
            loss,
            exec,
            rng,
            evaluations: cfg.population,
            state,
        })
    }

    pub fn state(&self) -> &SwarmState {
        &self.state
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// One iteration of the swarm.
    pub fn iterate(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let st = &mut self.state;
        if cfg.adaptive {
            let f = st.evolutionary_factor();
            st.evo_factor = f;
            st.evo_state = classify_state(f);
            let (c1, c2, omega) = adapt_coefficients(st.evo_state, st.c1, st.c2, f, &mut self.rng);
            st.c1 = c1;
            st.c2 = c2;
            st.omega = omega;
        }

        let gbest = st.gbest_position.clone();
        let dim = cfg.dim();
        let mut r1 = vec![0.0; dim];
        let mut r2 = vec![0.0; dim];
        for p in st.particles.iter_mut() {
            r1.iter_mut().for_each(|r| *r = self.rng.random());
            r2.iter_mut().for_each(|r| *r = self.rng.random());
            step_particle(p, &gbest, st.omega, st.c1, st.c2, &r1, &r2, cfg);
        }

        let positions: Vec<&[f64]> = st.particles.iter().map(|p| p.position.as_slice()).collect();
        let losses = evaluate(self.exec, self.loss, &positions)?;
        self.evaluations += losses.len();
        for (i, &l) in losses.iter().enumerate() {
            let p = &mut st.particles[i];
            if l < p.pbest_loss {
                p.pbest_loss = l;
                p.pbest_position.clone_from(&p.position);
                if l < st.gbest_loss {
                    st.gbest_loss = l;
                    st.gbest_position.clone_from(&p.position);
                    st.gbest_index = i;
                }
            }
        }
        st.current_loss = losses;

        if cfg.adaptive && st.evo_state == EvoState::Convergence {
            let candidate =
                elite_learning(&st.gbest_position, st.iteration, cfg.max_iter, cfg, &mut self.rng);
            let l = (self.loss)(&candidate);
            self.evaluations += 1;
            if !l.is_finite() {
                return Err(Error::NonFiniteLoss {
                    loss: l,
                    position: candidate,
                });
            }
            if l < st.gbest_loss {
                let g = &mut st.particles[st.gbest_index];
                g.position.clone_from(&candidate);
                g.pbest_position.clone_from(&candidate);
                g.pbest_loss = l;
                st.current_loss[st.gbest_index] = l;
                st.gbest_position = candidate;
                st.gbest_loss = l;
            } else {
                let worst = st
                    .current_loss
                    .iter()
                    .enumerate()
                    .fold(0, |w, (i, &x)| if x > st.current_loss[w] { i } else { w });
                let p = &mut st.particles[worst];
                p.position.clone_from(&candidate);
                st.current_loss[worst] = l;
                if l < p.pbest_loss {
                    p.pbest_loss = l;
                    p.pbest_position = candidate;
                }
            }
        }
        st.iteration += 1;
        Ok(())
    }

    pub fn into_state(self) -> SwarmState {
        self.state
    }
}

fn evaluate<L>(exec: &Executor, loss: &L, positions: &[&[f64]]) -> Result<Vec<f64>>
where
    L: Fn(&[f64]) -> f64 + Sync,
{
    let losses = exec.map(positions.len(), |i| loss(positions[i]));
    if let Some(i) = losses.iter().position(|l| !l.is_finite()) {
        return Err(Error::NonFiniteLoss {
            loss: losses[i],
            position: positions[i].to_vec(),
        });
    }
    Ok(losses)
}

/// Minimizes `loss` over the box of `cfg`.
pub fn optimize<L>(loss: &L, cfg: &SwarmConfig, exec: &Executor) -> Result<SwarmOutcome>
where
    L: Fn(&[f64]) -> f64 + Sync,
{
    let mut swarm = Swarm::initialize(cfg, loss, exec)?;
    let mut history = Vec::with_capacity(cfg.max_iter + 1);
    history.push(swarm.state().gbest_loss);
    let mut stalled = 0;
    for _ in 0..cfg.max_iter {
        let before = swarm.state().gbest_loss;
        swarm.iterate()?;
        let after = swarm.state().gbest_loss;
        history.push(after);
        if let Some(patience) = cfg.patience {
            if before - after < STALL_TOLERANCE {
                stalled += 1;
                if stalled >= patience {
                    break;
                }
            } else {
                stalled = 0;
            }
        }
    }
    let evaluations = swarm.evaluations();
    let state = swarm.into_state();
    Ok(SwarmOutcome {
        best_position: state.gbest_position,
        best_loss: state.gbest_loss,
        history,
        iterations: state.iteration,
        evaluations,
    })
}
