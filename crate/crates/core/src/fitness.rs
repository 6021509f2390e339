//! Replicated-simulation fitness of a protocol configuration.
//!
//! Each replication contributes `(time + lost) / log10(kbytes + C)`, with
//! mean session time in seconds, mean lost packets per session and mean KiB
//! delivered per session; the fitness is the mean contribution. `C = 2`
//! keeps the denominator positive when nothing was delivered.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::Objective;
use crate::seed;
use crate::sim::{simulate_replication, Scenario, TransferOutcome};
use crate::space::{Bounds, VdtpConfig};

pub const DEFAULT_REPLICATIONS: usize = 10;
pub const C: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessReport {
    pub fitness: f64,
    pub replications: Vec<TransferOutcome>,
    pub config: VdtpConfig,
    pub n: usize,
    pub c_constant: f64,
}

/// Contribution of one replication.
pub fn replication_term(transmission_time_s: f64, lost_packets: f64, kbytes: f64) -> f64 {
    (transmission_time_s + lost_packets) / (kbytes + C).log10()
}

pub fn aggregate(outcomes: &[TransferOutcome]) -> f64 {
    outcomes
        .iter()
        .map(|o| {
            replication_term(
                o.transmission_time_s,
                o.lost_packets,
                o.kbytes_per_session(),
            )
        })
        .sum::<f64>()
        / outcomes.len() as f64
}

/// Simulate `n` replications of `config` on `scenario`; replication `r` is
/// seeded with `derive(seed, r)`.
pub fn evaluate(
    config: &VdtpConfig,
    scenario: &Scenario,
    n: usize,
    seed: u64,
) -> Result<FitnessReport> {
    if n == 0 {
        return Err(Error::Config("at least one replication is required".into()));
    }
    let settings = config.quantize();
    let replications: Vec<TransferOutcome> = (0..n)
        .map(|r| simulate_replication(&settings, scenario, seed::derive(seed, r as u64)))
        .collect();
    Ok(FitnessReport {
        fitness: aggregate(&replications),
        replications,
        config: *config,
        n,
        c_constant: C,
    })
}

/// Fitness as an optimizer objective.
///
/// Evaluation `k` of a run seeded with `run_seed` simulates with
/// `derive(derive(run_seed, EVALUATION_STREAM), k)`, so any evaluation can be
/// replayed exactly from the run seed and its index.
pub struct SimulationObjective {
    pub scenario: Scenario,
    pub bounds: Bounds,
    pub replications: usize,
    pub run_seed: u64,
}

impl SimulationObjective {
    pub fn new(scenario: Scenario, replications: usize, run_seed: u64) -> Self {
        Self {
            scenario,
            bounds: Bounds::default(),
            replications,
            run_seed,
        }
    }

    pub fn with_bounds(mut self, bounds: Bounds) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn evaluation_seed(&self, evaluation_index: usize) -> u64 {
        seed::derive(
            seed::derive(self.run_seed, seed::EVALUATION_STREAM),
            evaluation_index as u64,
        )
    }

    /// Full report for the configuration scored at `evaluation_index`.
    pub fn report(&self, config: &VdtpConfig, evaluation_index: usize) -> Result<FitnessReport> {
        evaluate(
            config,
            &self.scenario,
            self.replications,
            self.evaluation_seed(evaluation_index),
        )
    }
}

impl Objective for SimulationObjective {
    fn evaluate(&mut self, x: &[f64], evaluation_index: usize) -> f64 {
        let config = self
            .bounds
            .clamp(VdtpConfig::from_slice(x).expect("three coordinates"));
        self.report(&config, evaluation_index)
            .map(|r| r.fitness)
            .unwrap_or(f64::INFINITY)
    }
}
