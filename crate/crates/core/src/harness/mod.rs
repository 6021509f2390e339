//! Experiment orchestration: single tuning runs, multi-seed campaigns,
//! parameter sweeps, analytic benchmarks and their CSV/text reports.

pub mod bench;
pub mod campaign;
mod config;
pub mod report;
pub mod sweep;

pub use campaign::{
    run_campaign, tune_run, CampaignResult, PairwiseTest, QosRow, Timing, TuneOutcome,
};
pub use config::{ExperimentConfig, DEFAULT_RUNS, DEFAULT_SEED};

use crate::seed;
use crate::space::VdtpConfig;

/// Configuration used in the field trials, the baseline every tuned
/// configuration is compared against.
pub fn human_expert_config(scenario_name: &str) -> VdtpConfig {
    if scenario_name.eq_ignore_ascii_case("highway") {
        VdtpConfig::new(25_600.0, 10.0, 10.0)
    } else {
        VdtpConfig::new(25_600.0, 8.0, 8.0)
    }
}

/// Seed of run `run` (0-based); identical for every algorithm so runs pair up.
pub fn run_seed(master_seed: u64, run: usize) -> u64 {
    seed::derive(master_seed, run as u64)
}

/// Seed shared by every row of a QoS table.
pub fn qos_seed(master_seed: u64) -> u64 {
    seed::derive(master_seed, seed::QOS_STREAM)
}
