use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vdtp_tune::harness::{
    self, bench, qos_seed, report, run_seed, sweep, CampaignResult, ExperimentConfig, QosRow,
};
use vdtp_tune::sim::{self, effective_throughput, Scenario};
use vdtp_tune::{fitness, Algorithm, Error, Result, VdtpConfig};

#[derive(Parser)]
#[command(
    name = "vdtp-tune",
    version,
    about = "Tune vehicular file-transfer protocol parameters with metaheuristics"
)]
struct Cli {
    /// Experiment config file (TOML); flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Scenario preset or file; repeat to run several.
    #[arg(long, global = true)]
    scenario: Vec<String>,
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Objective evaluations per run.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Independent runs per algorithm.
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Parallel runs (0 = all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Simulated replications per fitness evaluation.
    #[arg(long, global = true)]
    replications: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one optimizer against the simulated fitness.
    Tune {
        #[arg(long, short)]
        algorithm: Algorithm,
        /// Run index; selects the same seed as that run of `compare`.
        #[arg(long, default_value_t = 0)]
        run: usize,
    },
    /// Run every configured algorithm for several seeds and compare them.
    Compare,
    /// Simulate one protocol configuration.
    Simulate {
        #[arg(long)]
        chunk: f64,
        #[arg(long)]
        attempts: f64,
        #[arg(long)]
        timeout: f64,
        /// Write the event trace of the first replication to this CSV file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Mean best fitness for every combination in a parameter grid.
    Sweep {
        #[arg(long, short)]
        algorithm: Algorithm,
        #[arg(long)]
        grid: PathBuf,
    },
    /// Run an optimizer on an analytic test function against random search.
    Bench {
        #[arg(long, short)]
        algorithm: Algorithm,
        #[arg(long, default_value = "sphere")]
        function: String,
        #[arg(long, default_value_t = 3)]
        dims: usize,
    },
}

impl Cli {
    fn experiment(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = self.scenario.first() {
            cfg.scenario = s.clone();
        }
        if let Some(v) = self.seed {
            cfg.master_seed = v;
        }
        if let Some(v) = self.budget {
            cfg.max_evaluations = v;
        }
        if let Some(v) = self.runs {
            cfg.runs = v;
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if let Some(v) = self.replications {
            cfg.replications = v;
        }
        Ok(cfg)
    }

    fn scenarios(&self, cfg: &ExperimentConfig) -> Result<Vec<Scenario>> {
        if self.scenario.is_empty() {
            Ok(vec![cfg.scenario()?])
        } else {
            self.scenario.iter().map(|s| Scenario::resolve(s)).collect()
        }
    }
}

fn tune(cli: &Cli, algorithm: Algorithm, run: usize) -> Result<()> {
    let cfg = cli.experiment()?;
    cfg.validate()?;
    let scenario = cfg.scenario()?;
    let params = cfg.params_for(algorithm);
    let seed = run_seed(cfg.master_seed, run);
    let outcome = harness::tune_run(
        &params,
        &scenario,
        &cfg.bounds,
        cfg.max_evaluations,
        cfg.replications,
        seed,
    )?;
    fs::create_dir_all(&cfg.out)?;
    let trace = cfg.out.join(report::trace_file_name(algorithm, run));
    report::write_trace(&trace, &outcome.record)?;
    let best = cfg.out.join(format!(
        "best_{}_{run}.json",
        algorithm.name().to_lowercase()
    ));
    fs::write(&best, serde_json::to_string_pretty(&outcome)? + "\n")?;
    let c = outcome.report.config;
    println!(
        "{algorithm} on {} ({} evaluations, seed {seed})",
        scenario.name,
        outcome.record.evaluations()
    );
    println!(
        "best fitness {:.6} at evaluation {}: chunk_size {:.0}, total_attempts {:.0}, retransmission_time {:.3}",
        outcome.record.best_fitness, outcome.record.best_evaluation, c.chunk_size, c.total_attempts, c.retransmission_time
    );
    println!("wrote {} and {}", trace.display(), best.display());
    Ok(())
}

fn compare(cli: &Cli) -> Result<()> {
    let base = cli.experiment()?;
    let scenarios = cli.scenarios(&base)?;
    if base.algorithms.len() < 2 {
        return Err(Error::Config(
            "compare needs at least two algorithms".into(),
        ));
    }
    for scenario in &scenarios {
        let mut cfg = base.clone();
        if scenarios.len() > 1 {
            cfg.scenario =
                cli.scenario[scenarios.iter().position(|s| s == scenario).unwrap_or(0)].clone();
            cfg.out = base.out.join(&scenario.name);
        }
        let result: CampaignResult = harness::run_campaign(&cfg)?;
        let human = harness::human_expert_config(&scenario.name);
        let qos = harness::campaign::qos_table(
            &result,
            scenario,
            &human,
            fitness::DEFAULT_REPLICATIONS,
            cfg.master_seed,
        )?;
        report::write_campaign(&cfg.out, &result, &qos)?;
        println!("== {} ==\n", scenario.name);
        print!("{}", report::render_report(&result, &qos));
        println!("\nMean time per run\n");
        print!("{}", report::render_timing(&result));
        println!("\nwrote results to {}", cfg.out.display());
    }
    Ok(())
}

fn simulate(cli: &Cli, config: VdtpConfig, trace: Option<&PathBuf>) -> Result<()> {
    let cfg = cli.experiment()?;
    cfg.bounds.check(&config)?;
    if cfg.replications < 1 {
        return Err(Error::Config("replications must be at least 1".into()));
    }
    for scenario in cli.scenarios(&cfg)? {
        let seed = qos_seed(cfg.master_seed);
        let report = fitness::evaluate(&config, &scenario, cfg.replications, seed)?;
        let mut out = io::stdout().lock();
        writeln!(out, "scenario {}: {:?}", scenario.name, config.quantize())?;
        writeln!(
            out,
            "{:>4}{:>12}{:>10}{:>12}{:>10}{:>10}",
            "rep", "time (s)", "lost", "data (kB)", "refused", "kB/s"
        )?;
        for (r, o) in report.replications.iter().enumerate() {
            writeln!(
                out,
                "{r:>4}{:>12.4}{:>10.3}{:>12.2}{:>10}{:>10.2}",
                o.transmission_time_s,
                o.lost_packets,
                o.kbytes_per_session(),
                o.refused_sessions,
                effective_throughput(o)
            )?;
        }
        let row = QosRow::from_report(scenario.name.clone(), &report);
        writeln!(
            out,
            "mean session time {:.4} s, lost packets {:.3}, data {:.2} kB",
            row.transmission_time_s, row.lost_packets, row.data_transferred_kbytes
        )?;
        writeln!(out, "fitness {:.6}", report.fitness)?;
        writeln!(out, "mean throughput {:.2} kB/s", row.throughput_kbps)?;
        if let Some(path) = trace {
            let (_, events) = sim::simulate_replication_traced(
                &config.quantize(),
                &scenario,
                vdtp_tune::seed::derive(seed, 0),
            );
            sim::write_event_trace(&events, fs::File::create(path)?)?;
            writeln!(out, "wrote {} events to {}", events.len(), path.display())?;
        }
    }
    Ok(())
}

fn sweep_cmd(cli: &Cli, algorithm: Algorithm, grid: &PathBuf) -> Result<()> {
    let cfg = cli.experiment()?;
    let grid = sweep::Grid::load(grid)?;
    let scenarios = cli.scenarios(&cfg)?;
    let settings = sweep::SweepSettings {
        bounds: &cfg.bounds,
        runs: cfg.runs,
        max_evaluations: cfg.max_evaluations,
        replications: cfg.replications,
        master_seed: cfg.master_seed,
        workers: cfg.workers,
    };
    let result = sweep::run_sweep(&cfg.params_for(algorithm), &grid, &scenarios, &settings)?;
    fs::create_dir_all(&cfg.out)?;
    let path = cfg.out.join("sweep.csv");
    sweep::write_sweep(&path, &result)?;
    print!("{:<12}", "scenario");
    for l in &result.labels {
        print!("{l:>16}");
    }
    println!();
    for (name, cells) in &result.rows {
        print!("{name:<12}");
        for c in cells {
            print!("{c:>16.6}");
        }
        println!();
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn bench_cmd(cli: &Cli, algorithm: Algorithm, function: &str, dims: usize) -> Result<()> {
    let cfg = cli.experiment()?;
    let function: bench::Function = function.parse()?;
    let r = bench::bench(
        &cfg.params_for(algorithm),
        function,
        dims,
        cfg.max_evaluations,
        cfg.runs,
        cfg.master_seed,
    )?;
    println!(
        "{algorithm} on {function:?} ({dims}-D, budget {}, {} runs)",
        cfg.max_evaluations, cfg.runs
    );
    println!(
        "{:<10}{:>14}{:>14}{:>14}{:>14}{:>14}",
        "", "mean", "std", "min", "median", "max"
    );
    for (name, s) in [
        (algorithm.name(), &r.summary),
        ("random", &r.random_summary),
    ] {
        println!(
            "{name:<10}{:>14.4e}{:>14.4e}{:>14.4e}{:>14.4e}{:>14.4e}",
            s.mean, s.std_dev, s.minimum, s.median, s.maximum
        );
    }
    println!(
        "runs beating the random-search median: {}/{}",
        r.wins_over_random_median(),
        cfg.runs
    );
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Tune { algorithm, run } => tune(cli, *algorithm, *run),
        Command::Compare => compare(cli),
        Command::Simulate {
            chunk,
            attempts,
            timeout,
            trace,
        } => simulate(
            cli,
            VdtpConfig::new(*chunk, *attempts, *timeout),
            trace.as_ref(),
        ),
        Command::Sweep { algorithm, grid } => sweep_cmd(cli, *algorithm, grid),
        Command::Bench {
            algorithm,
            function,
            dims,
        } => bench_cmd(cli, *algorithm, function, *dims),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
