//! (mu + lambda) and (mu, lambda) evolution strategies.
//!
//! Offspring come from the GA operators (blend recombination of two random
//! parents, single-gene reset mutation). Selection looks only at fitness
//! ranks: plus keeps the best `mu` of parents and offspring, comma the best
//! `mu` of the offspring alone.

use rand::Rng as _;

use super::operators::{best_indices, blend_crossover, random_point, reset_one_gene, Individual};
use super::{EsSelection, Evaluator, OptimizerParams};
use crate::seed::Rng;

pub struct Population {
    pub parents: Vec<Individual>,
}

/// Keep the `mu` best; `pool` order breaks ties, so list incumbents first.
pub fn select(pool: Vec<Individual>, mu: usize) -> Vec<Individual> {
    let keep = best_indices(&pool, mu);
    keep.into_iter().map(|i| pool[i].clone()).collect()
}

/// Next parent set from the current parents and their offspring.
pub fn survivors(
    parents: &[Individual],
    offspring: Vec<Individual>,
    mu: usize,
    selection: EsSelection,
) -> Vec<Individual> {
    match selection {
        EsSelection::Plus => {
            let mut pool = parents.to_vec();
            pool.extend(offspring);
            select(pool, mu)
        }
        EsSelection::Comma => select(offspring, mu),
    }
}

impl Population {
    /// Sample `lambda` random points and keep the best `mu` as parents.
    pub fn init(params: &OptimizerParams, eval: &mut Evaluator, rng: &mut Rng) -> Option<Self> {
        let dims = eval.dims();
        let pool = (0..params.lambda_es)
            .map(|_| eval.individual(random_point(dims, rng)))
            .collect::<Option<Vec<_>>>()?;
        Some(Self {
            parents: select(pool, params.mu_es),
        })
    }

    pub fn step(&mut self, params: &OptimizerParams, eval: &mut Evaluator, rng: &mut Rng) -> bool {
        let mut offspring = Vec::with_capacity(params.lambda_es);
        for _ in 0..params.lambda_es {
            let a = &self.parents[rng.random_range(0..self.parents.len())];
            let mut child = if rng.random::<f64>() < params.p_cross {
                let b = &self.parents[rng.random_range(0..self.parents.len())];
                blend_crossover(&a.x, &b.x, rng)
            } else {
                a.x.clone()
            };
            if rng.random::<f64>() < params.p_mut {
                reset_one_gene(&mut child, rng);
            }
            match eval.individual(child) {
                Some(ind) => offspring.push(ind),
                None => return false,
            }
        }
        self.parents = survivors(&self.parents, offspring, params.mu_es, params.es_selection);
        true
    }
}
