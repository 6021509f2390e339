//! CSV and plain-text renderings of campaign results.
//!
//! Every CSV has a header row. Floats are written in shortest round-trip
//! form, so [`CompareTables::read`] recovers exactly what was written.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::campaign::{CampaignResult, QosRow};
use crate::error::Result;
use crate::optim::{Algorithm, RunRecord};
use crate::stats::{PairedTestResult, SampleSummary};

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<csv::Result<Vec<T>>>()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub evaluation_index: usize,
    pub best_fitness: f64,
}

pub fn trace_file_name(algorithm: Algorithm, run: usize) -> String {
    format!("trace_{}_{run}.csv", algorithm.name().to_lowercase())
}

pub fn write_trace(path: &Path, record: &RunRecord) -> Result<()> {
    let rows: Vec<TraceRow> = record
        .trace
        .iter()
        .map(|t| TraceRow {
            evaluation_index: t.evaluation,
            best_fitness: t.best_fitness,
        })
        .collect();
    write_csv(path, &rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub mean: f64,
    pub std_dev: f64,
    pub minimum: f64,
    pub median: f64,
    pub maximum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRow {
    pub first: Algorithm,
    pub second: Algorithm,
    pub marker: String,
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    pub p_value: f64,
    pub n_effective: usize,
    pub exact: bool,
    pub significant: bool,
}

impl TestRow {
    pub fn result(&self) -> PairedTestResult {
        PairedTestResult {
            statistic: self.statistic,
            w_plus: self.w_plus,
            w_minus: self.w_minus,
            p_value: self.p_value,
            n_effective: self.n_effective,
            significant_at_05: self.significant,
            exact: self.exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub algorithm: Algorithm,
    pub mean_rank: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QosCsvRow {
    pub algorithm: String,
    pub chunk_size: f64,
    pub retransmission_time: f64,
    pub total_attempts: f64,
    pub transmission_time_s: f64,
    pub lost_packets: f64,
    pub data_transferred_kbytes: f64,
    pub throughput_kbps: f64,
    pub fitness: f64,
}

impl From<&QosRow> for QosCsvRow {
    fn from(q: &QosRow) -> Self {
        Self {
            algorithm: q.label.clone(),
            chunk_size: q.config.chunk_size,
            retransmission_time: q.config.retransmission_time,
            total_attempts: q.config.total_attempts,
            transmission_time_s: q.transmission_time_s,
            lost_packets: q.lost_packets,
            data_transferred_kbytes: q.data_transferred_kbytes,
            throughput_kbps: q.throughput_kbps,
            fitness: q.fitness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub algorithm: Algorithm,
    pub mean_time_to_best_s: f64,
    pub mean_run_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BestRow {
    run: usize,
    seed: u64,
    best_fitness: f64,
    best_evaluation: usize,
    chunk_size: f64,
    total_attempts: f64,
    retransmission_time: f64,
}

/// The statistical tables of a comparison, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareTables {
    pub summary: Vec<SummaryRow>,
    pub tests: Vec<TestRow>,
    pub ranks: Vec<RankRow>,
}

impl CompareTables {
    pub fn from_result(result: &CampaignResult) -> Self {
        let summary = result
            .algorithms
            .iter()
            .zip(&result.summaries)
            .map(|(&algorithm, s)| SummaryRow {
                algorithm,
                mean: s.mean,
                std_dev: s.std_dev,
                minimum: s.minimum,
                median: s.median,
                maximum: s.maximum,
            })
            .collect();
        let tests = result
            .tests
            .iter()
            .map(|t| TestRow {
                first: t.first,
                second: t.second,
                marker: t.marker().to_string(),
                statistic: t.result.statistic,
                w_plus: t.result.w_plus,
                w_minus: t.result.w_minus,
                p_value: t.result.p_value,
                n_effective: t.result.n_effective,
                exact: t.result.exact,
                significant: t.result.significant_at_05,
            })
            .collect();
        let ranks = match &result.friedman {
            Some(f) => result
                .algorithms
                .iter()
                .zip(&f.mean_ranks)
                .map(|(&algorithm, &mean_rank)| RankRow {
                    algorithm,
                    mean_rank,
                })
                .collect(),
            None => vec![],
        };
        Self {
            summary,
            tests,
            ranks,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_csv(&dir.join("summary.csv"), &self.summary)?;
        write_csv(&dir.join("tests.csv"), &self.tests)?;
        write_csv(&dir.join("ranks.csv"), &self.ranks)
    }

    pub fn read(dir: &Path) -> Result<Self> {
        Ok(Self {
            summary: read_csv(&dir.join("summary.csv"))?,
            tests: read_csv(&dir.join("tests.csv"))?,
            ranks: read_csv(&dir.join("ranks.csv"))?,
        })
    }

    pub fn summary_of(&self, algorithm: Algorithm) -> Option<SampleSummary> {
        self.summary
            .iter()
            .find(|r| r.algorithm == algorithm)
            .map(|r| SampleSummary {
                mean: r.mean,
                std_dev: r.std_dev,
                minimum: r.minimum,
                median: r.median,
                maximum: r.maximum,
            })
    }
}

/// Write every artifact of a comparison into `dir`.
///
/// `timing.csv` holds wall-clock times and is the only file that differs
/// between otherwise identical campaigns.
pub fn write_campaign(dir: &Path, result: &CampaignResult, qos: &[QosRow]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for runs in &result.records {
        for (run, record) in runs.iter().enumerate() {
            write_trace(&dir.join(trace_file_name(record.algorithm, run)), record)?;
        }
    }
    CompareTables::from_result(result).write(dir)?;
    let qos_rows: Vec<QosCsvRow> = qos.iter().map(QosCsvRow::from).collect();
    write_csv(&dir.join("qos.csv"), &qos_rows)?;
    let timing: Vec<TimingRow> = result
        .timing
        .iter()
        .map(|t| TimingRow {
            algorithm: t.algorithm,
            mean_time_to_best_s: t.mean_time_to_best_s,
            mean_run_time_s: t.mean_wall_time_s,
        })
        .collect();
    write_csv(&dir.join("timing.csv"), &timing)?;
    let mut best = serde_json::Map::new();
    for runs in &result.records {
        let rows: Vec<BestRow> = runs
            .iter()
            .enumerate()
            .map(|(run, r)| BestRow {
                run,
                seed: r.seed,
                best_fitness: r.best_fitness,
                best_evaluation: r.best_evaluation,
                chunk_size: r.best_position[0],
                total_attempts: r.best_position[1],
                retransmission_time: r.best_position[2],
            })
            .collect();
        best.insert(
            runs[0].algorithm.name().to_string(),
            serde_json::to_value(rows)?,
        );
    }
    fs::write(
        dir.join("best_configs.json"),
        serde_json::to_string_pretty(&best)? + "\n",
    )?;
    fs::write(dir.join("report.txt"), render_report(result, qos))?;
    Ok(())
}

/// Aligned-text rendering: descriptive statistics, the pairwise test
/// matrix, the Friedman ranking and the QoS table.
pub fn render_report(result: &CampaignResult, qos: &[QosRow]) -> String {
    let mut out = String::new();
    let runs = result.records.first().map_or(0, Vec::len);
    let _ = writeln!(out, "Final fitness over {runs} runs\n");
    let _ = writeln!(
        out,
        "{:<10}{:>14}{:>14}{:>14}{:>14}{:>14}",
        "algorithm", "mean", "std", "min", "median", "max"
    );
    for (alg, s) in result.algorithms.iter().zip(&result.summaries) {
        let _ = writeln!(
            out,
            "{:<10}{:>14.6}{:>14.6}{:>14.6}{:>14.6}{:>14.6}",
            alg.name(),
            s.mean,
            s.std_dev,
            s.minimum,
            s.median,
            s.maximum
        );
    }

    if !result.tests.is_empty() {
        let _ = writeln!(out, "\nSigned-rank tests (row vs column, p-value)");
        let _ = writeln!(
            out,
            "  ▲/▼ row significantly better/worse, △/▽ not significant, = identical\n"
        );
        let _ = write!(out, "{:<10}", "");
        for alg in &result.algorithms {
            let _ = write!(out, "{:>12}", alg.name());
        }
        out.push('\n');
        for &row in &result.algorithms {
            let _ = write!(out, "{:<10}", row.name());
            for &col in &result.algorithms {
                let cell = result
                    .tests
                    .iter()
                    .find(|t| t.first == row && t.second == col)
                    .map_or("-".to_string(), |t| {
                        format!("{} {:.4}", t.marker(), t.result.p_value)
                    });
                let _ = write!(out, "{cell:>12}");
            }
            out.push('\n');
        }
    }

    if let Some(f) = &result.friedman {
        let _ = writeln!(
            out,
            "\nFriedman ranking (chi2 = {:.4}, p = {:.4e})\n",
            f.statistic, f.p_value
        );
        let mut order: Vec<usize> = (0..f.mean_ranks.len()).collect();
        order.sort_by(|&a, &b| f.mean_ranks[a].total_cmp(&f.mean_ranks[b]));
        for (pos, &i) in order.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:>3}  {:<10}{:>8.4}",
                pos + 1,
                result.algorithms[i].name(),
                f.mean_ranks[i]
            );
        }
    }

    if !qos.is_empty() {
        let _ = writeln!(out, "\nQoS of median-run configurations\n");
        let _ = writeln!(
            out,
            "{:<14}{:>10}{:>10}{:>10}{:>12}{:>10}{:>12}{:>12}{:>10}",
            "algorithm",
            "chunk",
            "timeout",
            "attempts",
            "time (s)",
            "lost",
            "data (kB)",
            "kB/s",
            "fitness"
        );
        for q in qos {
            let _ = writeln!(
                out,
                "{:<14}{:>10.0}{:>10.2}{:>10.0}{:>12.3}{:>10.3}{:>12.1}{:>12.2}{:>10.4}",
                q.label,
                q.config.chunk_size,
                q.config.retransmission_time,
                q.config.total_attempts,
                q.transmission_time_s,
                q.lost_packets,
                q.data_transferred_kbytes,
                q.throughput_kbps,
                q.fitness
            );
        }
    }
    out
}

/// Aligned timing table; wall-clock values, so kept out of `report.txt`.
pub fn render_timing(result: &CampaignResult) -> String {
    let mut out = format!(
        "{:<10}{:>14}{:>14}\n",
        "algorithm", "T_best (s)", "T_run (s)"
    );
    for t in &result.timing {
        let _ = writeln!(
            out,
            "{:<10}{:>14.3}{:>14.3}",
            t.algorithm.name(),
            t.mean_time_to_best_s,
            t.mean_wall_time_s
        );
    }
    out
}
