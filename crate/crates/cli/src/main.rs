//! `srgm`: fit reliability growth models, run benchmark grids, generate
//! synthetic data, and search the parameter grid exhaustively.
//!
//! Exit status: 0 on success, 1 on a runtime failure, 2 on a usage or
//! validation error.

mod config;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use srgm::data::{generate_synthetic, load_csv, split_chronological, write_csv};
use srgm::harness::{self, emit_report, grid_oracle, parse_csv_report, HarnessError, ReportFormat};
use srgm::{
    minimize, Algorithm, FailureDataset, Metric, ModelKind, Objective, OptimizerConfig, Params, SearchSpace,
    SyntheticMode,
};
use thiserror::Error;

use config::{time_grid, CliConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Usage(_) => 2,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Io(_) | HarnessError::Csv(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "srgm", version, about = "Swarm-based parameter estimation for software reliability growth models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one model to a dataset with one optimizer.
    Fit(FitArgs),
    /// Run an experiment grid described by a JSON config and write reports.
    Benchmark(BenchmarkArgs),
    /// Write synthetic failure data drawn from a known model as CSV.
    Gendata(GendataArgs),
    /// Exhaustively search a regular (a, b) grid for the best fit.
    Oracle(OracleArgs),
    /// Re-render a CSV report in another format.
    Report(ReportArgs),
}

#[derive(Args)]
struct Bounds {
    #[arg(long, default_value_t = SearchSpace::default().a_min)]
    a_min: f64,
    #[arg(long, default_value_t = SearchSpace::default().a_max)]
    a_max: f64,
    #[arg(long, default_value_t = SearchSpace::default().b_min)]
    b_min: f64,
    #[arg(long, default_value_t = SearchSpace::default().b_max)]
    b_max: f64,
}

impl Bounds {
    fn space(&self) -> Result<SearchSpace, CliError> {
        SearchSpace::new(self.a_min, self.a_max, self.b_min, self.b_max).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Args)]
struct FitArgs {
    /// CSV file with a `time,failures` header.
    #[arg(long)]
    data: PathBuf,
    /// go, pow, dss or mo.
    #[arg(long)]
    model: ModelKind,
    /// cs, fa, pso or aco, with default settings.
    #[arg(long, default_value = "cs", conflicts_with = "optimizer")]
    algorithm: Algorithm,
    /// JSON optimizer settings, e.g. {"algorithm": "fa", "gamma": 0.5}.
    #[arg(long)]
    optimizer: Option<PathBuf>,
    /// Leading share of the points used for fitting; the rest is the test window.
    #[arg(long, default_value_t = 1.0)]
    train_fraction: f64,
    #[arg(long, default_value = "rmse")]
    metric: Metric,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    bounds: Bounds,
}

#[derive(Args)]
struct BenchmarkArgs {
    config: PathBuf,
    /// Directory for report files; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report formats (text, csv, markdown); overrides the config.
    #[arg(long, value_delimiter = ',')]
    format: Vec<ReportFormat>,
    /// Replaces the config's seeds with this many consecutive seeds starting here.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 1 runs serially. Defaults to all cores.
    #[arg(long, env = "SRGM_THREADS")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct GendataArgs {
    #[arg(long)]
    model: ModelKind,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    /// Observation times as start:end[:step], e.g. 1:100.
    #[arg(long, default_value = "1:100")]
    times: String,
    /// deterministic or poisson.
    #[arg(long, default_value = "deterministic")]
    mode: SyntheticMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    model: ModelKind,
    #[arg(long, default_value = "rmse")]
    metric: Metric,
    #[arg(long, default_value_t = 1.0)]
    train_fraction: f64,
    #[arg(long, default_value_t = harness::DEFAULT_RESOLUTION.0)]
    resolution_a: usize,
    #[arg(long, default_value_t = harness::DEFAULT_RESOLUTION.1)]
    resolution_b: usize,
    #[command(flatten)]
    bounds: Bounds,
}

#[derive(Args)]
struct ReportArgs {
    /// CSV report written by `benchmark`.
    input: PathBuf,
    #[arg(long, default_value = "text")]
    format: ReportFormat,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Benchmark(a) => cmd_benchmark(a),
        Command::Gendata(a) => cmd_gendata(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn read_dataset(path: &Path) -> Result<FailureDataset, CliError> {
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let file = File::open(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    load_csv(name, file).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_fit(args: FitArgs) -> Result<(), CliError> {
    let data = read_dataset(&args.data)?;
    let space = args.bounds.space()?;
    let cfg = match &args.optimizer {
        Some(path) => {
            let file = File::open(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            serde_json::from_reader::<_, OptimizerConfig>(io::BufReader::new(file))
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => args.algorithm.default_config(),
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let split = split_chronological(&data, args.train_fraction).map_err(|e| CliError::Usage(e.to_string()))?;
    let obj = Objective::new(args.model, &split.train, args.metric);
    let res = minimize(&obj, &space, &cfg, args.seed).map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut out = io::stdout().lock();
    writeln!(out, "dataset        {} ({} points, {} training)", data.name(), data.len(), split.train.len())?;
    writeln!(out, "model          {}", args.model.label())?;
    writeln!(out, "algorithm      {}", cfg.algorithm())?;
    writeln!(out, "a              {}", res.best_params.a)?;
    writeln!(out, "b              {}", res.best_params.b)?;
    writeln!(out, "training {:<6}{}", args.metric.name(), res.best_fitness)?;
    if !split.test.is_empty() {
        let test = Objective::new(args.model, &split.test, args.metric)
            .evaluate(&res.best_params)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        writeln!(out, "test {:<10}{}", args.metric.name(), test)?;
    }
    writeln!(out, "wall time ms   {:.3}", res.wall_time_ms)?;
    writeln!(out, "iter of best   {}", res.iter_of_best)?;
    writeln!(out, "evaluations    {}", res.evaluations)?;
    Ok(())
}

fn cmd_benchmark(args: BenchmarkArgs) -> Result<(), CliError> {
    let mut cfg = CliConfig::load(&args.config)?;
    if let Some(start) = args.seed {
        let n = cfg.seeds.len() as u64;
        cfg.seeds = (start..start + n).collect();
    }
    if args.jobs == Some(0) {
        return Err(CliError::Usage("jobs must be at least 1".into()));
    }
    let formats = if args.format.is_empty() { cfg.formats()? } else { args.format.clone() };
    let base = args.config.parent().unwrap_or(Path::new("."));
    let plan = cfg.to_plan(base)?;
    let report = harness::run_plan(&plan, args.jobs)?;

    let dir = args.out.or(cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("reports"));
    let stem = cfg.output.stem.clone().unwrap_or_else(|| {
        args.config.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into())
    });
    fs::create_dir_all(&dir)?;
    emit_report(&report, ReportFormat::Text, io::stdout().lock())?;
    println!();
    for f in formats {
        let path = dir.join(format!("{stem}.{}", f.extension()));
        emit_report(&report, f, BufWriter::new(File::create(&path)?))?;
        println!("wrote {}", path.display());
    }
    let failed: usize = report.cells.iter().map(|c| c.failures().count()).sum();
    if failed > 0 {
        eprintln!("warning: {failed} run(s) failed; see the report");
    }
    Ok(())
}

fn cmd_gendata(args: GendataArgs) -> Result<(), CliError> {
    let params = Params::new(args.a, args.b).map_err(|e| CliError::Usage(e.to_string()))?;
    let times = parse_times(&args.times).map_err(CliError::Usage)?;
    let data = generate_synthetic(args.model, params, &times, args.mode, args.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out = output(args.out.as_deref())?;
    write_csv(&data, &mut out).map_err(|e| CliError::Runtime(e.to_string()))?;
    out.flush()?;
    Ok(())
}

fn parse_times(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad time '{s}' in '{spec}'"));
    match parts.as_slice() {
        [start, end] => time_grid(num(start)?, num(end)?, 1.0),
        [start, end, step] => time_grid(num(start)?, num(end)?, num(step)?),
        _ => Err(format!("times must look like start:end[:step], got '{spec}'")),
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    let data = read_dataset(&args.data)?;
    let space = args.bounds.space()?;
    let split = split_chronological(&data, args.train_fraction).map_err(|e| CliError::Usage(e.to_string()))?;
    let obj = Objective::new(args.model, &split.train, args.metric);
    let (p, v) = grid_oracle(&obj, &space, args.resolution_a, args.resolution_b)?;
    println!("grid           {} x {}", args.resolution_a, args.resolution_b);
    println!("a              {}", p.a);
    println!("b              {}", p.b);
    println!("{:<15}{}", args.metric.name(), v);
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), CliError> {
    let file = File::open(&args.input).map_err(|e| CliError::Usage(format!("{}: {e}", args.input.display())))?;
    let report = parse_csv_report(io::BufReader::new(file)).map_err(|e| match e {
        HarnessError::Io(_) => CliError::Runtime(e.to_string()),
        _ => CliError::Usage(format!("{}: {e}", args.input.display())),
    })?;
    emit_report(&report, args.format, output(args.out.as_deref())?)?;
    Ok(())
}
