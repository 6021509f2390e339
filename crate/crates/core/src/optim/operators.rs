//! Variation and selection operators shared by GA, ES and SA.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::seed::Rng;

/// A unit-cube point with its fitness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub x: Vec<f64>,
    pub fitness: f64,
}

pub(crate) fn random_point(dims: usize, rng: &mut Rng) -> Vec<f64> {
    (0..dims).map(|_| rng.random::<f64>()).collect()
}

pub(crate) fn clamp_unit(x: &mut [f64]) {
    for v in x {
        *v = v.clamp(0.0, 1.0);
    }
}

/// Per-coordinate blend `beta * a + (1 - beta) * b` with a fresh `beta ~ U(0, 1)`.
pub fn blend_crossover(a: &[f64], b: &[f64], rng: &mut Rng) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(xa, xb)| {
            let beta = rng.random::<f64>();
            beta * xa + (1.0 - beta) * xb
        })
        .collect()
}

/// Redraw one uniformly chosen coordinate uniformly within its range.
pub fn reset_one_gene(x: &mut [f64], rng: &mut Rng) -> usize {
    let j = rng.random_range(0..x.len());
    x[j] = rng.random::<f64>();
    j
}

/// Binary tournament; the first contestant wins ties.
pub(crate) fn binary_tournament(pop: &[Individual], rng: &mut Rng) -> usize {
    let a = rng.random_range(0..pop.len());
    let b = rng.random_range(0..pop.len());
    if pop[b].fitness < pop[a].fitness {
        b
    } else {
        a
    }
}

/// Indices of the `count` fittest members; stable, so earlier entries win ties.
pub(crate) fn best_indices(pop: &[Individual], count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pop.len()).collect();
    idx.sort_by(|&i, &j| pop[i].fitness.total_cmp(&pop[j].fitness));
    idx.truncate(count);
    idx
}

pub(crate) fn best_of(pop: &[Individual]) -> usize {
    best_indices(pop, 1)[0]
}

pub(crate) fn worst_of(pop: &[Individual]) -> usize {
    // Last maximum, so that among equally bad members the newest goes first.
    (0..pop.len())
        .max_by(|&i, &j| pop[i].fitness.total_cmp(&pop[j].fitness))
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn mutation_changes_exactly_one_coordinate() {
        let mut rng = seed::rng(3);
        let base = [41358.0 / 524288.0, 3.0 / 250.0, 1.0];
        for _ in 0..200 {
            let mut x = base;
            let j = reset_one_gene(&mut x, &mut rng);
            for k in 0..3 {
                if k != j {
                    assert_eq!(x[k].to_bits(), base[k].to_bits());
                }
            }
        }
    }

    #[test]
    fn blend_stays_between_parents() {
        let mut rng = seed::rng(4);
        let a = [0.1, 0.9, 0.5];
        let b = [0.3, 0.2, 0.5];
        for _ in 0..200 {
            let c = blend_crossover(&a, &b, &mut rng);
            for k in 0..3 {
                assert!(c[k] >= a[k].min(b[k]) && c[k] <= a[k].max(b[k]));
            }
        }
    }

    #[test]
    fn selection_helpers() {
        let pop: Vec<Individual> = [3.0, 1.0, 1.0, 5.0, 5.0]
            .iter()
            .map(|&f| Individual {
                x: vec![f],
                fitness: f,
            })
            .collect();
        assert_eq!(best_indices(&pop, 3), vec![1, 2, 0]);
        assert_eq!(best_of(&pop), 1);
        assert_eq!(worst_of(&pop), 4);
    }
}
