//! Analytic test functions for validating optimizers without the simulator.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::run_seed;
use crate::error::{Error, Result};
use crate::optim::{self, OptimizerParams};
use crate::stats::{self, SampleSummary};

/// Search interval for every coordinate.
pub const DOMAIN: (f64, f64) = (-5.0, 5.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Function {
    Sphere,
    Rosenbrock,
    Rastrigin,
}

impl Function {
    pub fn value(self, x: &[f64]) -> f64 {
        match self {
            Function::Sphere => x.iter().map(|v| v * v).sum(),
            Function::Rosenbrock => x
                .windows(2)
                .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
                .sum(),
            Function::Rastrigin => {
                10.0 * x.len() as f64
                    + x.iter()
                        .map(|v| v * v - 10.0 * (2.0 * PI * v).cos())
                        .sum::<f64>()
            }
        }
    }
}

impl FromStr for Function {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sphere" => Ok(Function::Sphere),
            "rosenbrock" => Ok(Function::Rosenbrock),
            "rastrigin" => Ok(Function::Rastrigin),
            _ => Err(Error::Config(format!(
                "unknown function `{s}` (expected sphere, rosenbrock or rastrigin)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    /// Best value of each optimizer run.
    pub finals: Vec<f64>,
    pub summary: SampleSummary,
    /// Best value of uniform random search with the same budget and seeds.
    pub random_finals: Vec<f64>,
    pub random_summary: SampleSummary,
}

impl BenchResult {
    /// Runs whose best beats the median of the random-search bests.
    pub fn wins_over_random_median(&self) -> usize {
        self.finals
            .iter()
            .filter(|&&f| f < self.random_summary.median)
            .count()
    }
}

pub fn bench(
    params: &OptimizerParams,
    function: Function,
    dims: usize,
    max_evaluations: usize,
    runs: usize,
    master_seed: u64,
) -> Result<BenchResult> {
    if dims < 1 {
        return Err(Error::Config("dims must be at least 1".into()));
    }
    if runs < 1 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    let ranges = vec![DOMAIN; dims];
    let mut objective = |x: &[f64]| function.value(x);
    let mut finals = Vec::with_capacity(runs);
    let mut random_finals = Vec::with_capacity(runs);
    for run in 0..runs {
        let seed = run_seed(master_seed, run);
        finals
            .push(optim::run(params, &mut objective, &ranges, max_evaluations, seed)?.best_fitness);
        let trace = optim::random_search(&mut objective, &ranges, max_evaluations, seed);
        random_finals.push(*trace.last().expect("budget is at least one"));
    }
    Ok(BenchResult {
        summary: stats::summarize(&finals)?,
        random_summary: stats::summarize(&random_finals)?,
        finals,
        random_finals,
    })
}
