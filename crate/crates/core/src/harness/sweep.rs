//! Preliminary parameter tuning over a grid of optimizer settings.
//!
//! A grid file has one `key = v1, v2, ...` line per swept parameter; blank
//! lines and `#` comments are ignored. Every combination of the listed
//! values is run, the first key varying slowest.

use std::path::Path;

use super::campaign::{Campaign, ObjectiveFactory};
use crate::error::{Error, Result};
use crate::fitness::SimulationObjective;
use crate::optim::{Objective, OptimizerParams};
use crate::sim::Scenario;
use crate::space::Bounds;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub keys: Vec<String>,
    pub values: Vec<Vec<String>>,
}

impl Grid {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&std::fs::read_to_string(path)?).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut grid = Grid {
            keys: vec![],
            values: vec![],
        };
        let probe = OptimizerParams::default();
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| Error::Parse(format!("line {line_no}: {m}"));
            let (key, rest) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = values`, got `{line}`")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(err("missing parameter name".into()));
            }
            if grid.keys.iter().any(|k| k == key) {
                return Err(err(format!("`{key}` listed twice")));
            }
            let values: Vec<String> = rest.split(',').map(|v| v.trim().to_string()).collect();
            if values.iter().any(String::is_empty) {
                return Err(err(format!("empty value for `{key}`")));
            }
            for v in &values {
                probe.clone().set(key, v).map_err(|e| err(e.to_string()))?;
            }
            grid.keys.push(key.to_string());
            grid.values.push(values);
        }
        if grid.keys.is_empty() {
            return Err(Error::Parse("grid lists no parameters".into()));
        }
        Ok(grid)
    }

    /// Every combination as `(key, value)` pairs.
    pub fn combinations(&self) -> Vec<Vec<(String, String)>> {
        let mut combos: Vec<Vec<(String, String)>> = vec![vec![]];
        for (key, values) in self.keys.iter().zip(&self.values) {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |v| {
                        let mut next = c.clone();
                        next.push((key.clone(), v.clone()));
                        next
                    })
                })
                .collect();
        }
        combos
    }

    pub fn label(combo: &[(String, String)]) -> String {
        combo
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// `base` with each combination applied, validated against the budget.
    pub fn params(
        &self,
        base: &OptimizerParams,
        max_evaluations: usize,
    ) -> Result<Vec<OptimizerParams>> {
        self.combinations()
            .iter()
            .map(|combo| {
                let mut p = base.clone();
                for (k, v) in combo {
                    p.set(k, v)?;
                }
                p.validate(max_evaluations)
                    .map_err(|e| Error::Config(format!("{}: {e}", Grid::label(combo))))?;
                Ok(p)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub labels: Vec<String>,
    /// One row per scenario: its name and the mean best fitness per combination.
    pub rows: Vec<(String, Vec<f64>)>,
}

pub struct SweepSettings<'a> {
    pub bounds: &'a Bounds,
    pub runs: usize,
    pub max_evaluations: usize,
    pub replications: usize,
    pub master_seed: u64,
    pub workers: usize,
}

pub fn run_sweep(
    base: &OptimizerParams,
    grid: &Grid,
    scenarios: &[Scenario],
    s: &SweepSettings,
) -> Result<SweepResult> {
    let algorithms = grid.params(base, s.max_evaluations)?;
    let labels = grid.combinations().iter().map(|c| Grid::label(c)).collect();
    let mut rows = Vec::with_capacity(scenarios.len());
    for scenario in scenarios {
        let campaign = Campaign {
            algorithms: algorithms.clone(),
            runs: s.runs,
            max_evaluations: s.max_evaluations,
            ranges: s.bounds.ranges(),
            master_seed: s.master_seed,
            workers: s.workers,
            checkpoint_dir: None,
            objective_tag: String::new(),
        };
        let factory = |seed: u64| -> Box<dyn Objective> {
            Box::new(
                SimulationObjective::new(scenario.clone(), s.replications, seed)
                    .with_bounds(s.bounds.clone()),
            )
        };
        let factory: &ObjectiveFactory = &factory;
        let result = campaign.run(factory)?;
        rows.push((
            scenario.name.clone(),
            result.summaries.iter().map(|x| x.mean).collect(),
        ));
    }
    Ok(SweepResult { labels, rows })
}

/// `scenario` column followed by one column per combination.
pub fn write_sweep(path: &Path, result: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["scenario".to_string()];
    header.extend(result.labels.iter().cloned());
    w.write_record(&header)?;
    for (name, cells) in &result.rows {
        let mut record = vec![name.clone()];
        record.extend(cells.iter().map(f64::to_string));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
