//! Particle swarm optimization with inertia weight.
//!
//! Each particle's velocity blends its previous velocity with pulls towards
//! its own best position and the swarm leader, using fresh `2 * U(0, 1)`
//! coefficients per particle and dimension. The leader is refreshed once per
//! generation after every particle has moved.

use rand::Rng as _;

use super::operators::random_point;
use super::{Evaluator, OptimizerParams};
use crate::seed::Rng;

/// Velocity limit per coordinate, as a fraction of the (unit) range.
const MAX_SPEED: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub personal_best: Vec<f64>,
    pub personal_best_fitness: f64,
}

/// New velocity of one coordinate.
pub fn velocity(
    w: f64,
    v: f64,
    x: f64,
    personal_best: f64,
    leader: f64,
    phi1: f64,
    phi2: f64,
) -> f64 {
    w * v + phi1 * (personal_best - x) + phi2 * (leader - x)
}

impl Particle {
    /// Apply the velocity and position update with the given coefficients,
    /// keeping the particle in the unit cube.
    pub fn fly(&mut self, leader: &[f64], w: f64, phi1: &[f64], phi2: &[f64]) {
        for d in 0..self.position.len() {
            let x = self.position[d];
            let v = velocity(
                w,
                self.velocity[d],
                x,
                self.personal_best[d],
                leader[d],
                phi1[d],
                phi2[d],
            )
            .clamp(-MAX_SPEED, MAX_SPEED);
            let moved = x + v;
            if (0.0..=1.0).contains(&moved) {
                self.position[d] = moved;
                self.velocity[d] = v;
            } else {
                // Stick to the wall and stop along this axis.
                self.position[d] = moved.clamp(0.0, 1.0);
                self.velocity[d] = 0.0;
            }
        }
    }
}

pub struct Swarm {
    pub particles: Vec<Particle>,
    pub leader: Vec<f64>,
    pub leader_fitness: f64,
}

impl Swarm {
    pub fn init(params: &OptimizerParams, eval: &mut Evaluator, rng: &mut Rng) -> Option<Self> {
        let dims = eval.dims();
        let mut particles = Vec::with_capacity(params.population_size);
        for _ in 0..params.population_size {
            let position = random_point(dims, rng);
            let velocity = (0..dims).map(|_| 0.0).collect();
            let f = eval.evaluate(&position)?;
            particles.push(Particle {
                personal_best: position.clone(),
                position,
                velocity,
                personal_best_fitness: f,
            });
        }
        let mut swarm = Swarm {
            particles,
            leader: vec![],
            leader_fitness: f64::INFINITY,
        };
        swarm.update_leader();
        Some(swarm)
    }

    fn update_leader(&mut self) {
        for p in &self.particles {
            if p.personal_best_fitness < self.leader_fitness || self.leader.is_empty() {
                self.leader_fitness = p.personal_best_fitness;
                self.leader.clone_from(&p.personal_best);
            }
        }
    }

    /// One generation; `false` if the budget ran out part-way.
    pub fn step(&mut self, params: &OptimizerParams, eval: &mut Evaluator, rng: &mut Rng) -> bool {
        let dims = eval.dims();
        let mut phi1 = vec![0.0; dims];
        let mut phi2 = vec![0.0; dims];
        let mut complete = true;
        for particle in &mut self.particles {
            for d in 0..dims {
                phi1[d] = 2.0 * rng.random::<f64>();
                phi2[d] = 2.0 * rng.random::<f64>();
            }
            particle.fly(&self.leader, params.w, &phi1, &phi2);
            let Some(f) = eval.evaluate(&particle.position) else {
                complete = false;
                break;
            };
            if f < particle.personal_best_fitness {
                particle.personal_best_fitness = f;
                particle.personal_best.clone_from(&particle.position);
            }
        }
        self.update_leader();
        complete
    }
}
