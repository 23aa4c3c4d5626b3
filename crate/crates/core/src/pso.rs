//! Particle swarm optimization.
//!
//! Each iteration evaluates every particle, refreshes personal bests (strict
//! improvement only), refreshes the social best (swarm-wide or ring
//! neighbourhood), then applies
//!
//! ```text
//! v ← c0·v + c1·r1·(pbest − x) + c2·r2·(social − x)     (clamped to ±v_max)
//! x ← x + v                                             (clamped to bounds)
//! ```
//!
//! with fresh `r1[d]`, `r2[d]` ~ U[0, 1) per dimension. Fitness is always
//! minimised.
//!
//! Randomness comes from ChaCha8 seeded with [`SwarmConfig::seed`]. Draws are
//! taken in a fixed order (initial positions then velocities per particle,
//! then `r1[d], r2[d]` per dimension per particle during updates), so a
//! `(config, objective)` pair fully determines a run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::objectives::Objective;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PsoError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid swarm configuration: {0}")]
    InvalidConfig(String),
    #[error("every particle of the initial swarm produced a non-finite fitness")]
    AllParticlesInvalid,
}

/// How a particle picks the best position it is pulled towards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// Swarm-wide best (gbest).
    Global,
    /// Best among particles `i - radius ..= i + radius` (mod swarm size),
    /// including `i` itself (lbest).
    Ring { radius: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    pub dimension: usize,
    pub swarm_size: usize,
    /// Inertia.
    pub c0: f64,
    /// Cognitive pull towards the particle's own best.
    pub c1: f64,
    /// Social pull towards the neighbourhood best.
    pub c2: f64,
    pub topology: Topology,
    /// Per-dimension `(low, high)` box.
    pub bounds: Vec<(f64, f64)>,
    /// Per-dimension velocity cap.
    pub v_max: Vec<f64>,
    pub max_iterations: usize,
    /// Stop early once gbest improved by less than this over the last
    /// `stagnation_window` iterations. A window of 0 disables the rule.
    pub stagnation_epsilon: f64,
    pub stagnation_window: usize,
    pub seed: u64,
}

impl SwarmConfig {
    /// Defaults: 30 particles, `c0 = 1`, `c1 = c2 = 2`, global topology,
    /// `v_max = (high - low) / 2`, 1000 iterations, stagnation rule off.
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        let v_max = bounds.iter().map(|(lo, hi)| 0.5 * (hi - lo)).collect();
        Self {
            dimension: bounds.len(),
            swarm_size: 30,
            c0: 1.0,
            c1: 2.0,
            c2: 2.0,
            topology: Topology::Global,
            bounds,
            v_max,
            max_iterations: 1000,
            stagnation_epsilon: 0.0,
            stagnation_window: 0,
            seed: 0,
        }
    }

    /// Default configuration over the objective's search box.
    pub fn for_objective(objective: &Objective) -> Self {
        Self::new(objective.bounds().to_vec())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_coefficients(mut self, c0: f64, c1: f64, c2: f64) -> Self {
        self.c0 = c0;
        self.c1 = c1;
        self.c2 = c2;
        self
    }

    pub fn with_swarm_size(mut self, swarm_size: usize) -> Self {
        self.swarm_size = swarm_size;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_topology(mut self, topology: Topology) -> Self {
        self.topology = topology;
        self
    }

    pub fn with_stagnation(mut self, epsilon: f64, window: usize) -> Self {
        self.stagnation_epsilon = epsilon;
        self.stagnation_window = window;
        self
    }

    /// Scales every `v_max[d]` to `fraction · (high - low)`.
    pub fn with_velocity_fraction(mut self, fraction: f64) -> Self {
        self.v_max = self
            .bounds
            .iter()
            .map(|(lo, hi)| fraction * (hi - lo))
            .collect();
        self
    }

    pub fn validate(&self) -> Result<(), PsoError> {
        let invalid = |msg: String| Err(PsoError::InvalidConfig(msg));
        if self.dimension == 0 {
            return invalid("dimension must be positive".into());
        }
        if self.swarm_size == 0 {
            return invalid("swarm_size must be positive".into());
        }
        for (name, c) in [("c0", self.c0), ("c1", self.c1), ("c2", self.c2)] {
            if !(c.is_finite() && c >= 0.0) {
                return invalid(format!("{name} must be finite and non-negative, got {c}"));
            }
        }
        if self.bounds.len() != self.dimension {
            return Err(PsoError::DimensionMismatch {
                expected: self.dimension,
                actual: self.bounds.len(),
            });
        }
        if self.v_max.len() != self.dimension {
            return Err(PsoError::DimensionMismatch {
                expected: self.dimension,
                actual: self.v_max.len(),
            });
        }
        for (d, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return invalid(format!(
                    "bounds[{d}] = ({lo}, {hi}) is not a proper interval"
                ));
            }
        }
        for (d, &v) in self.v_max.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return invalid(format!("v_max[{d}] must be positive, got {v}"));
            }
        }
        if let Topology::Ring { radius } = self.topology {
            if radius == 0 || 2 * radius >= self.swarm_size {
                return invalid(format!(
                    "ring radius {radius} must be in 1..swarm_size/2 (swarm_size {})",
                    self.swarm_size
                ));
            }
        }
        if self.stagnation_epsilon.is_nan() || self.stagnation_epsilon < 0.0 {
            return invalid("stagnation_epsilon must be non-negative".into());
        }
        Ok(())
    }
}

/// Source of the `U[0, 1)` factors `r1`, `r2` in the velocity update.
pub trait UnitDraws {
    fn next_unit(&mut self) -> f64;
}

impl UnitDraws for ChaCha8Rng {
    fn next_unit(&mut self) -> f64 {
        self.random::<f64>()
    }
}

/// Returns the same value on every draw. Used to pin `r1 = r2` in tests.
#[derive(Debug, Clone, Copy)]
pub struct FixedDraws(pub f64);

impl UnitDraws for FixedDraws {
    fn next_unit(&mut self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub pbest_position: Vec<f64>,
    pub pbest_fitness: f64,
}

/// New velocity for `p`, pulled towards its personal best and `social_best`.
/// Draws `r1[d]` then `r2[d]` for each dimension in turn.
pub fn update_velocity(
    p: &Particle,
    social_best: &[f64],
    config: &SwarmConfig,
    draws: &mut dyn UnitDraws,
) -> Result<Vec<f64>, PsoError> {
    let dim = p.position.len();
    for len in [
        p.velocity.len(),
        p.pbest_position.len(),
        social_best.len(),
        config.v_max.len(),
    ] {
        if len != dim {
            return Err(PsoError::DimensionMismatch {
                expected: dim,
                actual: len,
            });
        }
    }
    let mut next = Vec::with_capacity(dim);
    for (d, &x) in p.position.iter().enumerate() {
        let r1 = draws.next_unit();
        let r2 = draws.next_unit();
        let v = config.c0 * p.velocity[d]
            + config.c1 * r1 * (p.pbest_position[d] - x)
            + config.c2 * r2 * (social_best[d] - x);
        next.push(v.clamp(-config.v_max[d], config.v_max[d]));
    }
    Ok(next)
}

/// Moves `p` by its velocity. A coordinate pushed outside its bound is
/// clamped onto it and that velocity component is zeroed.
pub fn update_position(p: &mut Particle, bounds: &[(f64, f64)]) {
    for ((x, v), &(lo, hi)) in p.position.iter_mut().zip(&mut p.velocity).zip(bounds) {
        let moved = *x + *v;
        if moved < lo || moved > hi {
            *x = moved.clamp(lo, hi);
            *v = 0.0;
        } else {
            *x = moved;
        }
    }
}

#[derive(Debug, Clone)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub gbest_position: Vec<f64>,
    pub gbest_fitness: f64,
    pub iteration: usize,
    /// Evaluations that returned a non-finite fitness so far.
    pub invalid_evaluations: usize,
    config: SwarmConfig,
    rng: ChaCha8Rng,
}

fn finite_or_inf(f: f64) -> f64 {
    if f.is_finite() {
        f
    } else {
        f64::INFINITY
    }
}

/// Index of the smallest fitness among `candidates`, lowest index on ties.
fn best_of(particles: &[Particle], candidates: impl Iterator<Item = usize>) -> usize {
    candidates
        .min_by(|&a, &b| {
            particles[a]
                .pbest_fitness
                .total_cmp(&particles[b].pbest_fitness)
                .then(a.cmp(&b))
        })
        .expect("non-empty neighbourhood")
}

impl Swarm {
    /// Random initial swarm: positions uniform in the box, velocities uniform
    /// in `[-v_max, v_max)`, personal bests at the starting positions.
    pub fn init(config: &SwarmConfig, objective: &Objective) -> Result<Self, PsoError> {
        config.validate()?;
        if objective.dimension() != config.dimension {
            return Err(PsoError::DimensionMismatch {
                expected: config.dimension,
                actual: objective.dimension(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut invalid = 0;
        let particles: Vec<Particle> = (0..config.swarm_size)
            .map(|_| {
                let position: Vec<f64> = config
                    .bounds
                    .iter()
                    .map(|&(lo, hi)| lo + rng.next_unit() * (hi - lo))
                    .collect();
                let velocity = config
                    .v_max
                    .iter()
                    .map(|&vm| -vm + rng.next_unit() * 2.0 * vm)
                    .collect();
                let raw = objective.evaluate(&position);
                if !raw.is_finite() {
                    invalid += 1;
                }
                Particle {
                    pbest_position: position.clone(),
                    pbest_fitness: finite_or_inf(raw),
                    position,
                    velocity,
                }
            })
            .collect();
        let best = best_of(&particles, 0..particles.len());
        Ok(Self {
            gbest_position: particles[best].pbest_position.clone(),
            gbest_fitness: particles[best].pbest_fitness,
            particles,
            iteration: 0,
            invalid_evaluations: invalid,
            config: config.clone(),
            rng,
        })
    }

    pub fn config(&self) -> &SwarmConfig {
        &self.config
    }

    /// One iteration using the swarm's own generator.
    pub fn step(&mut self, objective: &Objective) {
        let mut rng = self.rng.clone();
        self.step_with(objective, &mut rng);
        self.rng = rng;
    }

    /// One iteration with `r1`/`r2` taken from `draws`.
    pub fn step_with(&mut self, objective: &Objective, draws: &mut dyn UnitDraws) {
        for p in &mut self.particles {
            let raw = objective.evaluate(&p.position);
            if !raw.is_finite() {
                self.invalid_evaluations += 1;
            }
            let fitness = finite_or_inf(raw);
            if fitness < p.pbest_fitness {
                p.pbest_fitness = fitness;
                p.pbest_position.clone_from(&p.position);
            }
        }

        let n = self.particles.len();
        // personal bests never get worse, so neither does their minimum
        let best = best_of(&self.particles, 0..n);
        self.gbest_fitness = self.particles[best].pbest_fitness;
        self.gbest_position
            .clone_from(&self.particles[best].pbest_position);

        let social: Vec<usize> = match self.config.topology {
            Topology::Global => vec![best; n],
            Topology::Ring { radius } => (0..n)
                .map(|i| {
                    best_of(
                        &self.particles,
                        (0..=2 * radius).map(|o| (i + n - radius + o) % n),
                    )
                })
                .collect(),
        };

        for (i, &s) in social.iter().enumerate() {
            let social_best = &self.particles[s].pbest_position;
            let v = update_velocity(&self.particles[i], social_best, &self.config, draws)
                .expect("swarm vectors share the configured dimension");
            self.particles[i].velocity = v;
        }
        for p in &mut self.particles {
            update_position(p, &self.config.bounds);
        }
        self.iteration += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub iterations: usize,
    /// gbest fitness before the first iteration and after each one.
    pub history: Vec<f64>,
}

/// Initialises a swarm and iterates until `max_iterations` or the
/// stagnation rule fires.
pub fn run(config: &SwarmConfig, objective: &Objective) -> Result<RunOutcome, PsoError> {
    let mut swarm = Swarm::init(config, objective)?;
    if !swarm.gbest_fitness.is_finite() {
        return Err(PsoError::AllParticlesInvalid);
    }
    let mut history = vec![swarm.gbest_fitness];
    let window = config.stagnation_window;
    while swarm.iteration < config.max_iterations {
        swarm.step(objective);
        assert!(
            swarm.gbest_fitness <= *history.last().unwrap(),
            "gbest fitness increased"
        );
        history.push(swarm.gbest_fitness);
        let it = swarm.iteration;
        if window > 0
            && it >= window
            && history[it - window] - history[it] < config.stagnation_epsilon
        {
            break;
        }
    }
    Ok(RunOutcome {
        best_position: swarm.gbest_position,
        best_fitness: swarm.gbest_fitness,
        iterations: swarm.iteration,
        history,
    })
}
