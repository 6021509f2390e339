//! Simulated annealing with logistic acceptance and geometric cooling.

use rand::Rng as _;

use super::operators::{random_point, reset_one_gene, Individual};
use super::{Evaluator, OptimizerParams};
use crate::seed::Rng;

/// Temperature used when no probe move worsened the initial solution.
pub const FALLBACK_TEMPERATURE: f64 = 1.0;

/// Probability of accepting a move whose fitness changes by `delta`
/// (`f(candidate) - f(current)`), at temperature `t`.
///
/// Non-worsening moves are always taken; worsening ones with
/// `2 / (1 + exp(delta / t))`, which falls from 1 towards 0 as `delta / t` grows.
pub fn acceptance_probability(delta: f64, t: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else {
        2.0 / (1.0 + (delta / t).exp())
    }
}

/// Temperature at which a move worsening fitness by `delta` is accepted with
/// probability `target`.
pub fn temperature_for(delta: f64, target: f64) -> f64 {
    delta / (2.0 / target - 1.0).ln()
}

/// Starting temperature from a set of probe deltas: the mean uphill delta is
/// accepted with probability `target`.
pub fn temperature_from_deltas(deltas: &[f64], target: f64) -> f64 {
    let uphill: Vec<f64> = deltas
        .iter()
        .copied()
        .filter(|d| *d > 0.0 && d.is_finite())
        .collect();
    if uphill.is_empty() {
        return FALLBACK_TEMPERATURE;
    }
    let mean = uphill.iter().sum::<f64>() / uphill.len() as f64;
    temperature_for(mean, target)
}

pub struct Annealer {
    pub current: Individual,
    pub temperature: f64,
}

impl Annealer {
    /// Evaluate a random start, then probe its neighborhood to set the temperature.
    pub fn init(params: &OptimizerParams, eval: &mut Evaluator, rng: &mut Rng) -> Option<Self> {
        let current = eval.individual(random_point(eval.dims(), rng))?;
        let mut deltas = Vec::with_capacity(params.sa_probes);
        for _ in 0..params.sa_probes {
            let mut x = current.x.clone();
            reset_one_gene(&mut x, rng);
            match eval.evaluate(&x) {
                Some(f) => deltas.push(f - current.fitness),
                None => break,
            }
        }
        let temperature = temperature_from_deltas(&deltas, params.target_accept);
        Some(Self {
            current,
            temperature,
        })
    }

    /// One Markov chain at the current temperature, then cool down.
    pub fn step(&mut self, params: &OptimizerParams, eval: &mut Evaluator, rng: &mut Rng) -> bool {
        for _ in 0..params.markov_chain_length {
            let mut x = self.current.x.clone();
            reset_one_gene(&mut x, rng);
            let Some(f) = eval.evaluate(&x) else {
                return false;
            };
            let p = acceptance_probability(f - self.current.fitness, self.temperature);
            if p >= 1.0 || rng.random::<f64>() < p {
                self.current = Individual { x, fitness: f };
            }
        }
        self.temperature *= params.alpha_temp;
        true
    }
}
