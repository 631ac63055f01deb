//! JSON benchmark configuration.
//!
//! ```json
//! {
//!   "datasets": [
//!     { "file": { "path": "data/Data1.csv" } },
//!     { "synthetic": { "name": "go-500", "model": "go", "a": 500, "b": 0.05, "t_end": 100 } }
//!   ],
//!   "models": ["go", "pow", "dss"],
//!   "algorithms": [{ "algorithm": "cs" }, { "algorithm": "fa", "alpha": 0.02 }],
//!   "train_fraction": 0.7,
//!   "metric": "rmse",
//!   "seeds": [0, 1, 2],
//!   "space": { "a_max": 5000 },
//!   "output": { "dir": "reports", "stem": "run", "formats": ["text", "csv", "markdown"] }
//! }
//! ```
//!
//! Relative dataset paths resolve against the directory of the config file.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use srgm::data::{generate_synthetic, load_csv};
use srgm::harness::{default_seeds, ExperimentPlan, ReportFormat};
use srgm::{FailureDataset, Metric, ModelKind, OptimizerConfig, Params, SearchSpace, SyntheticMode};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub datasets: Vec<DatasetSpec>,
    pub models: Vec<String>,
    pub algorithms: Vec<OptimizerConfig>,
    #[serde(default = "full_training")]
    pub train_fraction: f64,
    #[serde(default = "rmse")]
    pub metric: String,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub space: SearchSpace,
    #[serde(default)]
    pub output: OutputSpec,
}

fn full_training() -> f64 {
    1.0
}

fn rmse() -> String {
    "rmse".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetSpec {
    File(FileSpec),
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileSpec {
    pub path: PathBuf,
    /// Defaults to the file stem.
    pub name: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub name: String,
    pub model: String,
    pub a: f64,
    pub b: f64,
    #[serde(default = "one")]
    pub t_start: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub t_step: f64,
    #[serde(default = "deterministic")]
    pub mode: String,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

fn deterministic() -> String {
    "deterministic".into()
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub stem: Option<String>,
    #[serde(default)]
    pub formats: Vec<String>,
}

/// Evenly spaced observation times from `start` to `end` inclusive.
pub fn time_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>, String> {
    if !(start > 0.0 && end >= start && step > 0.0 && start.is_finite() && end.is_finite()) {
        return Err(format!("need 0 < start <= end and step > 0, got {start}:{end}:{step}"));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + step * i as f64).collect())
}

impl CliConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let file = File::open(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        serde_json::from_reader(std::io::BufReader::new(file))
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn formats(&self) -> Result<Vec<ReportFormat>, CliError> {
        if self.output.formats.is_empty() {
            return Ok(vec![ReportFormat::Text, ReportFormat::Csv]);
        }
        self.output
            .formats
            .iter()
            .enumerate()
            .map(|(i, f)| f.parse().map_err(|e| CliError::Usage(format!("output.formats[{i}]: {e}"))))
            .collect()
    }

    /// Loads the datasets and builds the plan. `base` is the directory
    /// relative dataset paths resolve against.
    pub fn to_plan(&self, base: &Path) -> Result<ExperimentPlan, CliError> {
        let usage = |key: String, e: &dyn std::fmt::Display| CliError::Usage(format!("{key}: {e}"));
        let mut datasets = Vec::with_capacity(self.datasets.len());
        for (i, spec) in self.datasets.iter().enumerate() {
            datasets.push(load_dataset(spec, base).map_err(|e| usage(format!("datasets[{i}]"), &e))?);
        }
        let models = self
            .models
            .iter()
            .enumerate()
            .map(|(i, m)| m.parse::<ModelKind>().map_err(|e| usage(format!("models[{i}]"), &e)))
            .collect::<Result<Vec<_>, _>>()?;
        let metric: Metric = self.metric.parse().map_err(|e| usage("metric".into(), &e))?;
        Ok(ExperimentPlan {
            datasets,
            models,
            algorithms: self.algorithms.clone(),
            train_fraction: self.train_fraction,
            metric,
            seeds: self.seeds.clone(),
            space: self.space,
        })
    }
}

fn load_dataset(spec: &DatasetSpec, base: &Path) -> Result<FailureDataset, String> {
    match spec {
        DatasetSpec::File(f) => {
            let path = if f.path.is_absolute() { f.path.clone() } else { base.join(&f.path) };
            let name = match &f.name {
                Some(n) => n.clone(),
                None => path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            };
            let file = File::open(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            load_csv(name, file).map_err(|e| format!("{}: {e}", path.display()))
        }
        DatasetSpec::Synthetic(s) => {
            let kind: ModelKind = s.model.parse().map_err(|e| format!("model: {e}"))?;
            let mode: SyntheticMode = s.mode.parse().map_err(|e| format!("mode: {e}"))?;
            let params = Params::new(s.a, s.b).map_err(|e| e.to_string())?;
            let times = time_grid(s.t_start, s.t_end, s.t_step)?;
            generate_synthetic(kind, params, &times, mode, s.seed)
                .map(|d| d.with_name(s.name.clone()))
                .map_err(|e| e.to_string())
        }
    }
}
