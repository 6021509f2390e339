//! Single tuning runs and multi-seed campaigns.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{qos_seed, run_seed, ExperimentConfig};
use crate::error::{Error, Result};
use crate::fitness::{self, FitnessReport, SimulationObjective};
use crate::optim::{self, Algorithm, Objective, OptimizerParams, RunRecord};
use crate::sim::{effective_throughput, Scenario};
use crate::space::{Bounds, VdtpConfig};
use crate::stats::{self, FriedmanTable, PairedTestResult, SampleSummary};

/// Builds a fresh objective for the run with the given seed.
pub type ObjectiveFactory<'a> = dyn Fn(u64) -> Box<dyn Objective> + Sync + 'a;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneOutcome {
    pub record: RunRecord,
    /// Replay of the evaluation that produced the best fitness.
    pub report: FitnessReport,
}

/// One optimizer run against the simulated fitness.
pub fn tune_run(
    params: &OptimizerParams,
    scenario: &Scenario,
    bounds: &Bounds,
    max_evaluations: usize,
    replications: usize,
    seed: u64,
) -> Result<TuneOutcome> {
    let mut objective =
        SimulationObjective::new(scenario.clone(), replications, seed).with_bounds(bounds.clone());
    let record = optim::run(
        params,
        &mut objective,
        &bounds.ranges(),
        max_evaluations,
        seed,
    )?;
    let config = bounds.clamp(VdtpConfig::from_slice(&record.best_position)?);
    let report = objective.report(&config, record.best_evaluation)?;
    Ok(TuneOutcome { record, report })
}

/// A grid of independent runs: every algorithm, runs `0..runs`.
#[derive(Debug, Clone)]
pub struct Campaign {
    pub algorithms: Vec<OptimizerParams>,
    pub runs: usize,
    pub max_evaluations: usize,
    pub ranges: Vec<(f64, f64)>,
    pub master_seed: u64,
    /// Parallel runs; 0 uses every core.
    pub workers: usize,
    /// Where per-run checkpoints live; `None` disables checkpointing.
    pub checkpoint_dir: Option<PathBuf>,
    /// Describes the objective. Checkpoints written under a different tag are ignored.
    pub objective_tag: String,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    fingerprint: String,
    record: RunRecord,
}

impl Campaign {
    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        let scenario = config.scenario()?;
        let tag = serde_json::to_string(&(&scenario, &config.bounds, config.replications))?;
        Ok(Self {
            algorithms: config.algorithms.clone(),
            runs: config.runs,
            max_evaluations: config.max_evaluations,
            ranges: config.bounds.ranges(),
            master_seed: config.master_seed,
            workers: config.workers,
            checkpoint_dir: Some(config.out.join("checkpoints")),
            objective_tag: tag,
        })
    }

    fn fingerprint(&self, params: &OptimizerParams, seed: u64) -> Result<String> {
        Ok(serde_json::to_string(&(
            params,
            &self.ranges,
            self.max_evaluations,
            seed,
            &self.objective_tag,
        ))?)
    }

    fn checkpoint_path(&self, dir: &Path, index: usize, run: usize) -> PathBuf {
        dir.join(format!(
            "{}_{}_{}.json",
            self.algorithms[index].algorithm.name().to_lowercase(),
            index,
            run
        ))
    }

    fn load_checkpoint(&self, path: &Path, fingerprint: &str) -> Option<RunRecord> {
        let text = fs::read_to_string(path).ok()?;
        let cp: Checkpoint = serde_json::from_str(&text).ok()?;
        (cp.fingerprint == fingerprint).then_some(cp.record)
    }

    fn one(&self, index: usize, run: usize, factory: &ObjectiveFactory) -> Result<RunRecord> {
        let params = &self.algorithms[index];
        let seed = run_seed(self.master_seed, run);
        let fingerprint = self.fingerprint(params, seed)?;
        let path = self
            .checkpoint_dir
            .as_deref()
            .map(|d| self.checkpoint_path(d, index, run));
        if let Some(record) = path
            .as_deref()
            .and_then(|p| self.load_checkpoint(p, &fingerprint))
        {
            return Ok(record);
        }
        let mut objective = factory(seed);
        let record = optim::run(
            params,
            objective.as_mut(),
            &self.ranges,
            self.max_evaluations,
            seed,
        )?;
        if let Some(path) = path {
            let tmp = path.with_extension("json.tmp");
            fs::write(
                &tmp,
                serde_json::to_vec(&Checkpoint {
                    fingerprint,
                    record: record.clone(),
                })?,
            )?;
            fs::rename(&tmp, &path)?;
        }
        Ok(record)
    }

    /// Execute every (algorithm, run) pair, reusing matching checkpoints.
    pub fn run(&self, factory: &ObjectiveFactory) -> Result<CampaignResult> {
        if self.runs < 1 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms to run".into()));
        }
        for p in &self.algorithms {
            p.validate(self.max_evaluations)?;
        }
        if let Some(dir) = &self.checkpoint_dir {
            fs::create_dir_all(dir)?;
        }
        let jobs: Vec<(usize, usize)> = (0..self.algorithms.len())
            .flat_map(|a| (0..self.runs).map(move |r| (a, r)))
            .collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
        let done: Vec<Result<RunRecord>> = pool.install(|| {
            jobs.par_iter()
                .map(|&(a, r)| self.one(a, r, factory))
                .collect()
        });
        let mut records: Vec<Vec<RunRecord>> =
            vec![Vec::with_capacity(self.runs); self.algorithms.len()];
        for (&(a, _), rec) in jobs.iter().zip(done) {
            records[a].push(rec?);
        }
        CampaignResult::from_records(records)
    }
}

/// Campaign over the simulated fitness described by `config`.
pub fn run_campaign(config: &ExperimentConfig) -> Result<CampaignResult> {
    config.validate()?;
    let scenario = config.scenario()?;
    let campaign = Campaign::from_config(config)?;
    let factory = |seed: u64| -> Box<dyn Objective> {
        Box::new(
            SimulationObjective::new(scenario.clone(), config.replications, seed)
                .with_bounds(config.bounds.clone()),
        )
    };
    campaign.run(&factory)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub first: Algorithm,
    pub second: Algorithm,
    pub result: PairedTestResult,
}

impl PairwiseTest {
    /// `▲`/`▼` when `first` is significantly better/worse than `second`,
    /// `△`/`▽` when the difference is not significant, `=` with no difference.
    pub fn marker(&self) -> &'static str {
        let r = &self.result;
        if r.w_plus == r.w_minus {
            "="
        } else {
            match (r.first_is_better(), r.significant_at_05) {
                (true, true) => "▲",
                (true, false) => "△",
                (false, true) => "▼",
                (false, false) => "▽",
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub algorithm: Algorithm,
    pub mean_time_to_best_s: f64,
    pub mean_wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub algorithms: Vec<Algorithm>,
    /// `records[a][r]` is run `r` of algorithm `a`.
    pub records: Vec<Vec<RunRecord>>,
    pub summaries: Vec<SampleSummary>,
    /// Every ordered pair of distinct algorithms, row-major.
    pub tests: Vec<PairwiseTest>,
    /// Absent with fewer than two runs.
    pub friedman: Option<FriedmanTable>,
    pub timing: Vec<Timing>,
}

impl CampaignResult {
    pub fn from_records(records: Vec<Vec<RunRecord>>) -> Result<Self> {
        let algorithms: Vec<Algorithm> = records.iter().map(|runs| runs[0].algorithm).collect();
        for rec in records.iter().flatten() {
            let last = rec.trace.last().map(|t| t.best_fitness);
            if last.map(f64::to_bits) != Some(rec.best_fitness.to_bits()) {
                return Err(Error::Stats(format!(
                    "{} run has a trace that disagrees with its best",
                    rec.algorithm
                )));
            }
        }
        let finals: Vec<Vec<f64>> = records
            .iter()
            .map(|runs| runs.iter().map(|r| r.best_fitness).collect())
            .collect();
        let summaries = finals
            .iter()
            .map(|f| stats::summarize(f))
            .collect::<Result<Vec<_>>>()?;
        let runs = finals[0].len();
        let mut tests = Vec::new();
        let mut friedman = None;
        if runs >= 2 {
            for (i, a) in finals.iter().enumerate() {
                for (j, b) in finals.iter().enumerate() {
                    if i != j {
                        let result = stats::wilcoxon_signed_rank(a, b)?;
                        tests.push(PairwiseTest {
                            first: algorithms[i],
                            second: algorithms[j],
                            result,
                        });
                    }
                }
            }
            if algorithms.len() >= 2 {
                let blocks: Vec<Vec<f64>> = (0..runs)
                    .map(|r| finals.iter().map(|f| f[r]).collect())
                    .collect();
                friedman = Some(stats::friedman_ranks(&blocks)?);
            }
        }
        let timing = records
            .iter()
            .map(|runs| {
                let n = runs.len() as f64;
                Timing {
                    algorithm: runs[0].algorithm,
                    mean_time_to_best_s: runs.iter().map(|r| r.time_to_best_s).sum::<f64>() / n,
                    mean_wall_time_s: runs.iter().map(|r| r.wall_time_s).sum::<f64>() / n,
                }
            })
            .collect();
        Ok(Self {
            algorithms,
            records,
            summaries,
            tests,
            friedman,
            timing,
        })
    }

    pub fn final_fitnesses(&self, index: usize) -> Vec<f64> {
        self.records[index].iter().map(|r| r.best_fitness).collect()
    }

    /// Run whose final fitness is the (lower) median of algorithm `index`.
    pub fn median_run(&self, index: usize) -> &RunRecord {
        let runs = &self.records[index];
        let mut order: Vec<usize> = (0..runs.len()).collect();
        order.sort_by(|&a, &b| runs[a].best_fitness.total_cmp(&runs[b].best_fitness));
        &runs[order[(runs.len() - 1) / 2]]
    }

    /// Best run across all algorithms; earlier algorithms and runs win ties.
    pub fn best_overall(&self) -> &RunRecord {
        self.records
            .iter()
            .flatten()
            .reduce(|best, r| {
                if r.best_fitness < best.best_fitness {
                    r
                } else {
                    best
                }
            })
            .expect("campaign has runs")
    }

    /// Tests with `first == algorithm`, in algorithm order.
    pub fn tests_for(&self, algorithm: Algorithm) -> impl Iterator<Item = &PairwiseTest> {
        self.tests.iter().filter(move |t| t.first == algorithm)
    }

    /// Equality ignoring wall-clock timing.
    pub fn same_result(&self, other: &CampaignResult) -> bool {
        self.algorithms == other.algorithms
            && self.records.len() == other.records.len()
            && self
                .records
                .iter()
                .zip(&other.records)
                .all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_result(y)))
            && self.summaries == other.summaries
            && self.tests == other.tests
            && self.friedman == other.friedman
    }
}

/// Simulated QoS indicators of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QosRow {
    pub label: String,
    pub config: VdtpConfig,
    /// Mean session time over replications, seconds.
    pub transmission_time_s: f64,
    pub lost_packets: f64,
    /// Mean data delivered per session, KiB.
    pub data_transferred_kbytes: f64,
    /// Mean effective throughput, KiB/s.
    pub throughput_kbps: f64,
    pub fitness: f64,
}

impl QosRow {
    pub fn from_report(label: impl Into<String>, report: &FitnessReport) -> Self {
        let n = report.replications.len() as f64;
        let mean = |f: &dyn Fn(&crate::sim::TransferOutcome) -> f64| {
            report.replications.iter().map(f).sum::<f64>() / n
        };
        Self {
            label: label.into(),
            config: report.config,
            transmission_time_s: mean(&|o| o.transmission_time_s),
            lost_packets: mean(&|o| o.lost_packets),
            data_transferred_kbytes: mean(&|o| o.kbytes_per_session()),
            throughput_kbps: mean(&effective_throughput),
            fitness: report.fitness,
        }
    }

    pub fn simulate(
        label: impl Into<String>,
        config: &VdtpConfig,
        scenario: &Scenario,
        n: usize,
        seed: u64,
    ) -> Result<Self> {
        Ok(Self::from_report(
            label,
            &fitness::evaluate(config, scenario, n, seed)?,
        ))
    }
}

/// QoS of each algorithm's median-run configuration followed by the
/// human-expert baseline, all simulated on the same seeds.
pub fn qos_table(
    result: &CampaignResult,
    scenario: &Scenario,
    baseline: &VdtpConfig,
    n: usize,
    master_seed: u64,
) -> Result<Vec<QosRow>> {
    let seed = qos_seed(master_seed);
    let mut rows = Vec::with_capacity(result.algorithms.len() + 1);
    for (i, alg) in result.algorithms.iter().enumerate() {
        let config = VdtpConfig::from_slice(&result.median_run(i).best_position)?;
        rows.push(QosRow::simulate(alg.name(), &config, scenario, n, seed)?);
    }
    rows.push(QosRow::simulate(
        "Human experts",
        baseline,
        scenario,
        n,
        seed,
    )?);
    Ok(rows)
}
