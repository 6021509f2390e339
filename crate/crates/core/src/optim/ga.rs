//! Genetic algorithm, generational (elitism of one) or steady-state.

use rand::Rng as _;

use super::operators::{
    best_of, binary_tournament, blend_crossover, random_point, reset_one_gene, worst_of, Individual,
};
use super::{Evaluator, GaVariant, OptimizerParams};
use crate::seed::Rng;

pub struct Population {
    pub members: Vec<Individual>,
}

/// Recombine two tournament winners with probability `p_cross` (otherwise copy
/// the first), then reset one gene with probability `p_mut`.
pub(crate) fn breed(pop: &[Individual], p_cross: f64, p_mut: f64, rng: &mut Rng) -> Vec<f64> {
    let a = binary_tournament(pop, rng);
    let b = binary_tournament(pop, rng);
    let mut child = if rng.random::<f64>() < p_cross {
        blend_crossover(&pop[a].x, &pop[b].x, rng)
    } else {
        pop[a].x.clone()
    };
    if rng.random::<f64>() < p_mut {
        reset_one_gene(&mut child, rng);
    }
    child
}

impl Population {
    pub fn init(params: &OptimizerParams, eval: &mut Evaluator, rng: &mut Rng) -> Option<Self> {
        let dims = eval.dims();
        let members = (0..params.population_size)
            .map(|_| eval.individual(random_point(dims, rng)))
            .collect::<Option<Vec<_>>>()?;
        Some(Self { members })
    }

    pub fn step(&mut self, params: &OptimizerParams, eval: &mut Evaluator, rng: &mut Rng) -> bool {
        match params.ga_variant {
            GaVariant::Generational => self.generational(params, eval, rng),
            GaVariant::Steady => self.steady(params, eval, rng),
        }
    }

    /// Build a full offspring population; the previous best survives if no
    /// child strictly beats it.
    fn generational(
        &mut self,
        params: &OptimizerParams,
        eval: &mut Evaluator,
        rng: &mut Rng,
    ) -> bool {
        let mut offspring = Vec::with_capacity(self.members.len());
        for _ in 0..self.members.len() {
            let child = breed(&self.members, params.p_cross, params.p_mut, rng);
            match eval.individual(child) {
                Some(ind) => offspring.push(ind),
                None => return false,
            }
        }
        let elite = &self.members[best_of(&self.members)];
        if !(offspring[best_of(&offspring)].fitness < elite.fitness) {
            let worst = worst_of(&offspring);
            offspring[worst] = elite.clone();
        }
        self.members = offspring;
        true
    }

    /// One generation's worth of single insertions replacing the worst member.
    fn steady(&mut self, params: &OptimizerParams, eval: &mut Evaluator, rng: &mut Rng) -> bool {
        for _ in 0..self.members.len() {
            let child = breed(&self.members, params.p_cross, params.p_mut, rng);
            let Some(ind) = eval.individual(child) else {
                return false;
            };
            let worst = worst_of(&self.members);
            if ind.fitness < self.members[worst].fitness {
                self.members[worst] = ind;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::{Algorithm, Evaluator};
    use crate::seed;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| (v - 0.3) * (v - 0.3)).sum()
    }

    #[test]
    fn no_variation_preserves_best() {
        let params = OptimizerParams {
            p_cross: 0.0,
            p_mut: 0.0,
            ..OptimizerParams::defaults(Algorithm::Ga)
        };
        let mut f = sphere;
        let mut eval = Evaluator::new(&mut f, &[(0.0, 1.0); 3], 1000);
        let mut rng = seed::rng(1);
        let mut pop = Population::init(&params, &mut eval, &mut rng).unwrap();
        for _ in 0..10 {
            let before = pop.members[best_of(&pop.members)].fitness;
            assert!(pop.step(&params, &mut eval, &mut rng));
            assert_eq!(pop.members[best_of(&pop.members)].fitness, before);
        }
    }

    #[test]
    fn steady_state_never_loses_best() {
        let params = OptimizerParams {
            ga_variant: GaVariant::Steady,
            ..OptimizerParams::defaults(Algorithm::Ga)
        };
        let mut f = sphere;
        let mut eval = Evaluator::new(&mut f, &[(0.0, 1.0); 3], 1000);
        let mut rng = seed::rng(2);
        let mut pop = Population::init(&params, &mut eval, &mut rng).unwrap();
        let mut best = pop.members[best_of(&pop.members)].fitness;
        while pop.step(&params, &mut eval, &mut rng) {
            let now = pop.members[best_of(&pop.members)].fitness;
            assert!(now <= best);
            best = now;
        }
    }
}
