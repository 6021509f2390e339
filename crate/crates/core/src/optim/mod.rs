//! Budget-accounted, seed-deterministic minimizers over a box.
//!
//! All five algorithms search the unit cube; [`Evaluator`] maps points onto
//! the caller's ranges right before calling the objective, counts every call
//! against the budget and records the best-so-far trace.

pub mod de;
pub mod es;
pub mod ga;
mod operators;
mod params;
pub mod pso;
pub mod sa;

use std::time::Instant;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use operators::Individual;
pub use params::{Algorithm, EsSelection, GaVariant, OptimizerParams};

use crate::error::{Error, Result};
use crate::seed::{self, Rng};
use crate::space::VdtpConfig;

pub const DEFAULT_MAX_EVALUATIONS: usize = 1000;

/// Something to minimize. `evaluation_index` is 1-based and lets stochastic
/// objectives derive a reproducible stream per call.
pub trait Objective {
    fn evaluate(&mut self, x: &[f64], evaluation_index: usize) -> f64;
}

impl<F: FnMut(&[f64]) -> f64> Objective for F {
    fn evaluate(&mut self, x: &[f64], _evaluation_index: usize) -> f64 {
        self(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub evaluation: usize,
    pub best_fitness: f64,
}

/// Budgeted gateway between an optimizer and the objective.
pub struct Evaluator<'a> {
    objective: &'a mut dyn Objective,
    ranges: Vec<(f64, f64)>,
    max_evaluations: usize,
    used: usize,
    best_position: Vec<f64>,
    best_fitness: f64,
    best_evaluation: usize,
    trace: Vec<TracePoint>,
    started: Instant,
    time_to_best: f64,
    physical: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        objective: &'a mut dyn Objective,
        ranges: &[(f64, f64)],
        max_evaluations: usize,
    ) -> Self {
        Self {
            objective,
            ranges: ranges.to_vec(),
            max_evaluations,
            used: 0,
            best_position: vec![],
            best_fitness: f64::INFINITY,
            best_evaluation: 0,
            trace: Vec::with_capacity(max_evaluations),
            started: Instant::now(),
            time_to_best: 0.0,
            physical: vec![0.0; ranges.len()],
        }
    }

    pub fn dims(&self) -> usize {
        self.ranges.len()
    }

    pub fn used(&self) -> usize {
        self.used
    }

    pub fn remaining(&self) -> usize {
        self.max_evaluations - self.used
    }

    pub fn exhausted(&self) -> bool {
        self.used >= self.max_evaluations
    }

    pub fn to_physical(&self, unit: &[f64]) -> Vec<f64> {
        unit.iter()
            .zip(&self.ranges)
            .map(|(u, (lo, hi))| (lo + u * (hi - lo)).clamp(*lo, *hi))
            .collect()
    }

    /// Score a unit-cube point, or `None` once the budget is spent.
    pub fn evaluate(&mut self, unit: &[f64]) -> Option<f64> {
        if self.exhausted() {
            return None;
        }
        for ((p, u), (lo, hi)) in self.physical.iter_mut().zip(unit).zip(&self.ranges) {
            *p = (lo + u * (hi - lo)).clamp(*lo, *hi);
        }
        self.used += 1;
        let f = self.objective.evaluate(&self.physical, self.used);
        if f < self.best_fitness || self.best_position.is_empty() {
            self.best_fitness = f;
            self.best_position.clone_from(&self.physical);
            self.best_evaluation = self.used;
            self.time_to_best = self.started.elapsed().as_secs_f64();
        }
        self.trace.push(TracePoint {
            evaluation: self.used,
            best_fitness: self.best_fitness,
        });
        Some(f)
    }

    /// Evaluate a point and wrap it, or `None` once the budget is spent.
    pub fn individual(&mut self, unit: Vec<f64>) -> Option<Individual> {
        self.evaluate(&unit)
            .map(|fitness| Individual { x: unit, fitness })
    }

    fn finish(self, algorithm: Algorithm, generations: usize, seed: u64) -> RunRecord {
        RunRecord {
            algorithm,
            best_position: self.best_position,
            best_fitness: self.best_fitness,
            best_evaluation: self.best_evaluation,
            trace: self.trace,
            generations,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            time_to_best_s: self.time_to_best,
            seed,
        }
    }
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    /// Best point found, in the objective's own coordinates.
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// 1-based evaluation at which the best was last improved.
    pub best_evaluation: usize,
    pub trace: Vec<TracePoint>,
    /// Generations (chains, for SA) completed, the initial population included.
    pub generations: usize,
    pub wall_time_s: f64,
    pub time_to_best_s: f64,
    pub seed: u64,
}

impl RunRecord {
    pub fn best_config(&self) -> Option<VdtpConfig> {
        VdtpConfig::from_slice(&self.best_position).ok()
    }

    pub fn evaluations(&self) -> usize {
        self.trace.len()
    }

    /// Equality ignoring wall-clock fields.
    pub fn same_result(&self, other: &RunRecord) -> bool {
        self.algorithm == other.algorithm
            && self.best_position == other.best_position
            && self.best_fitness.to_bits() == other.best_fitness.to_bits()
            && self.best_evaluation == other.best_evaluation
            && self.trace == other.trace
            && self.generations == other.generations
            && self.seed == other.seed
    }
}

/// Minimize `objective` over the box `ranges` with at most `max_evaluations` calls.
///
/// Parameters are validated before the first evaluation. Results are
/// bit-reproducible for a fixed `seed` and deterministic objective.
pub fn run(
    params: &OptimizerParams,
    objective: &mut dyn Objective,
    ranges: &[(f64, f64)],
    max_evaluations: usize,
    seed: u64,
) -> Result<RunRecord> {
    params.validate(max_evaluations)?;
    if ranges.is_empty() {
        return Err(Error::Config("search space has no dimensions".into()));
    }
    if let Some((lo, hi)) = ranges.iter().find(|(lo, hi)| !(lo < hi)) {
        return Err(Error::Config(format!("empty range [{lo}, {hi}]")));
    }
    let mut rng = seed::rng(seed::derive(seed, seed::OPTIMIZER_STREAM));
    let mut eval = Evaluator::new(objective, ranges, max_evaluations);
    let cap = params.generations.unwrap_or(usize::MAX);
    let generations = match params.algorithm {
        Algorithm::Pso => drive(
            pso::Swarm::init(params, &mut eval, &mut rng),
            cap,
            |s, e, r| s.step(params, e, r),
            &mut eval,
            &mut rng,
        ),
        Algorithm::De => drive(
            de::Population::init(params, &mut eval, &mut rng),
            cap,
            |s, e, r| s.step(params, e, r),
            &mut eval,
            &mut rng,
        ),
        Algorithm::Ga => drive(
            ga::Population::init(params, &mut eval, &mut rng),
            cap,
            |s, e, r| s.step(params, e, r),
            &mut eval,
            &mut rng,
        ),
        Algorithm::Es => drive(
            es::Population::init(params, &mut eval, &mut rng),
            cap,
            |s, e, r| s.step(params, e, r),
            &mut eval,
            &mut rng,
        ),
        Algorithm::Sa => drive(
            sa::Annealer::init(params, &mut eval, &mut rng),
            cap,
            |s, e, r| s.step(params, e, r),
            &mut eval,
            &mut rng,
        ),
    };
    Ok(eval.finish(params.algorithm, generations, seed))
}

/// Step `state` until the budget or the generation cap runs out.
/// Returns completed generations, counting initialization as the first.
fn drive<S>(
    state: Option<S>,
    cap: usize,
    mut step: impl FnMut(&mut S, &mut Evaluator, &mut Rng) -> bool,
    eval: &mut Evaluator,
    rng: &mut Rng,
) -> usize {
    let Some(mut state) = state else { return 0 };
    let mut generations = 1;
    while generations < cap && !eval.exhausted() {
        if !step(&mut state, eval, rng) {
            break;
        }
        generations += 1;
    }
    generations
}

/// Uniform random search; the baseline every optimizer should beat.
pub fn random_search(
    objective: &mut dyn Objective,
    ranges: &[(f64, f64)],
    max_evaluations: usize,
    seed: u64,
) -> Vec<f64> {
    let mut rng = seed::rng(seed::derive(seed, seed::OPTIMIZER_STREAM));
    let mut eval = Evaluator::new(objective, ranges, max_evaluations);
    while !eval.exhausted() {
        let u: Vec<f64> = (0..ranges.len()).map(|_| rng.random::<f64>()).collect();
        eval.evaluate(&u);
    }
    eval.trace.iter().map(|t| t.best_fitness).collect()
}
