//! Differential evolution, rand/1/bin.

use rand::Rng as _;

use super::operators::{clamp_unit, random_point, Individual};
use super::{Evaluator, OptimizerParams};
use crate::seed::Rng;

/// Donor combination `base + mu * (a - b)`.
pub fn mutant(base: &[f64], a: &[f64], b: &[f64], mu: f64) -> Vec<f64> {
    base.iter()
        .zip(a)
        .zip(b)
        .map(|((x, y), z)| x + mu * (y - z))
        .collect()
}

/// Binomial crossover: coordinate `j` comes from the mutant when
/// `draws[j] <= cr` or `j == forced`, otherwise from the target.
pub fn crossover(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    draws: &[f64],
    forced: usize,
) -> Vec<f64> {
    (0..target.len())
        .map(|j| {
            if draws[j] <= cr || j == forced {
                mutant[j]
            } else {
                target[j]
            }
        })
        .collect()
}

/// Three mutually distinct indices in `0..n`, all different from `target`.
pub fn pick_donors(n: usize, target: usize, rng: &mut Rng) -> [usize; 3] {
    debug_assert!(n >= 4);
    let mut picked = [usize::MAX; 3];
    for k in 0..3 {
        picked[k] = loop {
            let r = rng.random_range(0..n);
            if r != target && !picked[..k].contains(&r) {
                break r;
            }
        };
    }
    picked
}

pub struct Population {
    pub members: Vec<Individual>,
}

impl Population {
    pub fn init(params: &OptimizerParams, eval: &mut Evaluator, rng: &mut Rng) -> Option<Self> {
        let dims = eval.dims();
        let members = (0..params.population_size)
            .map(|_| eval.individual(random_point(dims, rng)))
            .collect::<Option<Vec<_>>>()?;
        Some(Self { members })
    }

    /// One synchronous generation: donors always come from the current population.
    pub fn step(&mut self, params: &OptimizerParams, eval: &mut Evaluator, rng: &mut Rng) -> bool {
        let n = self.members.len();
        let dims = eval.dims();
        let mut next = self.members.clone();
        let mut draws = vec![0.0; dims];
        let mut complete = true;
        for (i, slot) in next.iter_mut().enumerate() {
            let [r1, r2, r3] = pick_donors(n, i, rng);
            let w = mutant(
                &self.members[r1].x,
                &self.members[r2].x,
                &self.members[r3].x,
                params.mu_de,
            );
            let forced = rng.random_range(0..dims);
            for r in draws.iter_mut() {
                *r = rng.random::<f64>();
            }
            let mut trial = crossover(&self.members[i].x, &w, params.cr, &draws, forced);
            clamp_unit(&mut trial);
            let Some(f) = eval.evaluate(&trial) else {
                complete = false;
                break;
            };
            if f <= self.members[i].fitness {
                *slot = Individual {
                    x: trial,
                    fitness: f,
                };
            }
        }
        self.members = next;
        complete
    }
}
