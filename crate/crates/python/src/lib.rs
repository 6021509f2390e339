//! Python bindings: protocol configurations, scenarios, the simulator,
//! the fitness function, optimizer runs and the statistics helpers.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use vdtp_tune::harness::bench::{self, Function};
use vdtp_tune::optim::{self, Algorithm, OptimizerParams};
use vdtp_tune::sim::effective_throughput;
use vdtp_tune::stats::{self, SampleSummary};
use vdtp_tune::{fitness, harness, Error};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "VdtpConfig", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyVdtpConfig(vdtp_tune::VdtpConfig);

#[pymethods]
impl PyVdtpConfig {
    #[new]
    fn new(chunk_size: f64, total_attempts: f64, retransmission_time: f64) -> Self {
        Self(vdtp_tune::VdtpConfig::new(
            chunk_size,
            total_attempts,
            retransmission_time,
        ))
    }

    #[getter]
    fn chunk_size(&self) -> f64 {
        self.0.chunk_size
    }

    #[getter]
    fn total_attempts(&self) -> f64 {
        self.0.total_attempts
    }

    #[getter]
    fn retransmission_time(&self) -> f64 {
        self.0.retransmission_time
    }

    /// Integer chunk bytes and attempts as used by the simulator.
    fn quantize(&self) -> (u64, u32, f64) {
        let s = self.0.quantize();
        (s.chunk_bytes, s.attempts, s.timeout_s)
    }

    #[staticmethod]
    fn human_expert(scenario: &str) -> Self {
        Self(harness::human_expert_config(scenario))
    }

    fn __repr__(&self) -> String {
        format!(
            "VdtpConfig(chunk_size={}, total_attempts={}, retransmission_time={})",
            self.0.chunk_size, self.0.total_attempts, self.0.retransmission_time
        )
    }
}

#[pyclass(name = "Bounds", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBounds(vdtp_tune::Bounds);

#[pymethods]
impl PyBounds {
    #[new]
    #[pyo3(signature = (lower=None, upper=None))]
    fn new(lower: Option<[f64; 3]>, upper: Option<[f64; 3]>) -> PyResult<Self> {
        let d = vdtp_tune::Bounds::default();
        vdtp_tune::Bounds::new(lower.unwrap_or(d.lower()), upper.unwrap_or(d.upper()))
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn lower(&self) -> [f64; 3] {
        self.0.lower()
    }

    #[getter]
    fn upper(&self) -> [f64; 3] {
        self.0.upper()
    }

    fn contains(&self, config: &PyVdtpConfig) -> bool {
        self.0.contains(&config.0)
    }

    fn clamp(&self, config: &PyVdtpConfig) -> PyVdtpConfig {
        PyVdtpConfig(self.0.clamp(config.0))
    }

    /// Raise `ValueError` naming every violated bound.
    fn check(&self, config: &PyVdtpConfig) -> PyResult<()> {
        self.0.check(&config.0).map_err(py_err)
    }
}

#[pyclass(name = "Scenario", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyScenario(vdtp_tune::Scenario);

#[pymethods]
impl PyScenario {
    /// Built-in preset (`urban`, `highway`, `urban_a2`, `urban_a3`) or a scenario file.
    #[staticmethod]
    fn load(name_or_path: &str) -> PyResult<Self> {
        vdtp_tune::Scenario::resolve(name_or_path)
            .map(Self)
            .map_err(py_err)
    }

    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        vdtp_tune::Scenario::preset(name).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn presets() -> Vec<&'static str> {
        vdtp_tune::sim::PRESETS.to_vec()
    }

    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }

    #[getter]
    fn sessions(&self) -> u32 {
        self.0.sessions
    }

    #[getter]
    fn base_loss_prob(&self) -> f64 {
        self.0.base_loss_prob
    }

    #[getter]
    fn effective_loss(&self) -> f64 {
        self.0.effective_loss()
    }

    fn __repr__(&self) -> String {
        format!("Scenario({:?})", self.0.name)
    }
}

fn summary_dict<'py>(py: Python<'py>, s: &SampleSummary) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("mean", s.mean)?;
    d.set_item("std_dev", s.std_dev)?;
    d.set_item("minimum", s.minimum)?;
    d.set_item("median", s.median)?;
    d.set_item("maximum", s.maximum)?;
    Ok(d)
}

fn parse_algorithm(name: &str) -> PyResult<Algorithm> {
    name.parse().map_err(py_err)
}

/// Simulate `replications` replications and return the fitness with per-replication QoS.
#[pyfunction]
#[pyo3(signature = (config, scenario, replications=10, seed=0))]
fn simulate<'py>(
    py: Python<'py>,
    config: &PyVdtpConfig,
    scenario: &PyScenario,
    replications: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    vdtp_tune::Bounds::default()
        .check(&config.0)
        .map_err(py_err)?;
    let report = fitness::evaluate(&config.0, &scenario.0, replications, seed).map_err(py_err)?;
    let reps: Vec<Bound<'py, PyDict>> = report
        .replications
        .iter()
        .map(|o| {
            let d = PyDict::new(py);
            d.set_item("transmission_time_s", o.transmission_time_s)?;
            d.set_item("lost_packets", o.lost_packets)?;
            d.set_item("data_kbytes_per_session", o.kbytes_per_session())?;
            d.set_item("completed_sessions", o.completed_sessions)?;
            d.set_item("refused_sessions", o.refused_sessions)?;
            d.set_item("throughput_kbps", effective_throughput(o))?;
            Ok(d)
        })
        .collect::<PyResult<_>>()?;
    let out = PyDict::new(py);
    out.set_item("fitness", report.fitness)?;
    out.set_item("replications", reps)?;
    Ok(out)
}

/// Fitness of `config` averaged over `replications` simulated replications.
#[pyfunction]
#[pyo3(signature = (config, scenario, replications=10, seed=0))]
fn evaluate(
    config: &PyVdtpConfig,
    scenario: &PyScenario,
    replications: usize,
    seed: u64,
) -> PyResult<f64> {
    fitness::evaluate(&config.0, &scenario.0, replications, seed)
        .map(|r| r.fitness)
        .map_err(py_err)
}

/// Tune the protocol on `scenario` with one optimizer run.
#[pyfunction]
#[pyo3(signature = (algorithm, scenario, budget=1000, replications=10, seed=0, bounds=None))]
fn tune<'py>(
    py: Python<'py>,
    algorithm: &str,
    scenario: &PyScenario,
    budget: usize,
    replications: usize,
    seed: u64,
    bounds: Option<&PyBounds>,
) -> PyResult<Bound<'py, PyDict>> {
    let params = OptimizerParams::defaults(parse_algorithm(algorithm)?);
    let bounds = bounds.map(|b| b.0.clone()).unwrap_or_default();
    let out = harness::tune_run(&params, &scenario.0, &bounds, budget, replications, seed)
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("best_config", PyVdtpConfig(out.report.config))?;
    d.set_item("best_fitness", out.record.best_fitness)?;
    d.set_item("best_evaluation", out.record.best_evaluation)?;
    d.set_item(
        "trace",
        out.record
            .trace
            .iter()
            .map(|t| t.best_fitness)
            .collect::<Vec<_>>(),
    )?;
    d.set_item("generations", out.record.generations)?;
    Ok(d)
}

/// Minimize a Python callable over a box; returns `(best_x, best_f, trace)`.
#[pyfunction]
#[pyo3(signature = (algorithm, objective, bounds, budget=1000, seed=0))]
fn minimize(
    algorithm: &str,
    objective: Bound<'_, PyAny>,
    bounds: Vec<(f64, f64)>,
    budget: usize,
    seed: u64,
) -> PyResult<(Vec<f64>, f64, Vec<f64>)> {
    let params = OptimizerParams::defaults(parse_algorithm(algorithm)?);
    let mut failure: Option<PyErr> = None;
    let mut f = |x: &[f64]| -> f64 {
        if failure.is_some() {
            return f64::INFINITY;
        }
        match objective
            .call1((x.to_vec(),))
            .and_then(|v| v.extract::<f64>())
        {
            Ok(v) => v,
            Err(e) => {
                failure = Some(e);
                f64::INFINITY
            }
        }
    };
    let rec = optim::run(&params, &mut f, &bounds, budget, seed).map_err(py_err)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((
        rec.best_position,
        rec.best_fitness,
        rec.trace.iter().map(|t| t.best_fitness).collect(),
    ))
}

/// Optimizer vs random search on an analytic function over [-5, 5]^dims.
#[pyfunction]
#[pyo3(signature = (algorithm, function="sphere", dims=3, budget=1000, runs=20, seed=0))]
fn run_bench<'py>(
    py: Python<'py>,
    algorithm: &str,
    function: &str,
    dims: usize,
    budget: usize,
    runs: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let function: Function = function.parse().map_err(py_err)?;
    let params = OptimizerParams::defaults(parse_algorithm(algorithm)?);
    let r = bench::bench(&params, function, dims, budget, runs, seed).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("finals", r.finals.clone())?;
    d.set_item("summary", summary_dict(py, &r.summary)?)?;
    d.set_item("random_summary", summary_dict(py, &r.random_summary)?)?;
    d.set_item("wins_over_random_median", r.wins_over_random_median())?;
    Ok(d)
}

#[pyfunction]
fn summarize<'py>(py: Python<'py>, sample: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    summary_dict(py, &stats::summarize(&sample).map_err(py_err)?)
}

/// Two-sided paired signed-rank test.
#[pyfunction]
fn wilcoxon<'py>(py: Python<'py>, a: Vec<f64>, b: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let r = stats::wilcoxon_signed_rank(&a, &b).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("statistic", r.statistic)?;
    d.set_item("w_plus", r.w_plus)?;
    d.set_item("w_minus", r.w_minus)?;
    d.set_item("p_value", r.p_value)?;
    d.set_item("n_effective", r.n_effective)?;
    d.set_item("significant_at_05", r.significant_at_05)?;
    d.set_item("exact", r.exact)?;
    Ok(d)
}

/// Friedman ranking of columns (algorithms) over rows (blocks).
#[pyfunction]
fn friedman<'py>(py: Python<'py>, results: Vec<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
    let t = stats::friedman_ranks(&results).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("mean_ranks", t.mean_ranks)?;
    d.set_item("statistic", t.statistic)?;
    d.set_item("p_value", t.p_value)?;
    d.set_item("iman_davenport", t.iman_davenport)?;
    d.set_item("iman_davenport_p_value", t.iman_davenport_p_value)?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "vdtp_tune")]
fn vdtp_tune_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyVdtpConfig>()?;
    m.add_class::<PyBounds>()?;
    m.add_class::<PyScenario>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(tune, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    m.add_function(wrap_pyfunction!(wilcoxon, m)?)?;
    m.add_function(wrap_pyfunction!(friedman, m)?)?;
    Ok(())
}
