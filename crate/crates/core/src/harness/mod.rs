//! Experiment grids over datasets × models × algorithms, the brute-force
//! grid oracle, and report rendering.

mod report;

use rayon::prelude::*;
use thiserror::Error;

use crate::data::{split_chronological, DataError, FailureDataset};
use crate::fitness::{Cost, Metric, Objective};
use crate::models::{ModelError, ModelKind, Params, SearchSpace};
use crate::optimizers::{minimize, Algorithm, OptimizerConfig};

pub use report::{emit_report, parse_csv_report, ReportFormat, CSV_HEADER, STATISTICS};

/// Seeds used when a plan does not list its own.
pub const DEFAULT_SEED_COUNT: u64 = 11;

/// Default oracle resolution along `a` and `b`.
pub const DEFAULT_RESOLUTION: (usize, usize) = (2001, 1001);

pub fn default_seeds() -> Vec<u64> {
    (0..DEFAULT_SEED_COUNT).collect()
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("dataset '{name}': {source}")]
    Dataset {
        name: String,
        #[source]
        source: DataError,
    },
    #[error("oracle resolution along {axis} must be at least 2, got {value}")]
    Resolution { axis: char, value: usize },
    #[error(transparent)]
    Space(#[from] ModelError),
    #[error("report line {line}: {message}")]
    ParseReport { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub datasets: Vec<FailureDataset>,
    pub models: Vec<ModelKind>,
    pub algorithms: Vec<OptimizerConfig>,
    pub train_fraction: f64,
    pub metric: Metric,
    pub seeds: Vec<u64>,
    pub space: SearchSpace,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidPlan(m));
        if self.datasets.is_empty() {
            return bad("no datasets".into());
        }
        if self.models.is_empty() {
            return bad("no models".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms".into());
        }
        if self.seeds.is_empty() {
            return bad("no seeds".into());
        }
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return bad(format!("train_fraction must lie in (0, 1], got {}", self.train_fraction));
        }
        if let Some(s) = first_duplicate(&self.seeds) {
            return bad(format!("seed {s} listed twice"));
        }
        if let Some(m) = first_duplicate(&self.models) {
            return bad(format!("model {m} listed twice"));
        }
        let algs: Vec<Algorithm> = self.algorithms.iter().map(|c| c.algorithm()).collect();
        if let Some(a) = first_duplicate(&algs) {
            return bad(format!("algorithm {a} listed twice"));
        }
        let names: Vec<&str> = self.datasets.iter().map(|d| d.name()).collect();
        if let Some(n) = first_duplicate(&names) {
            return bad(format!("dataset '{n}' listed twice"));
        }
        for cfg in &self.algorithms {
            cfg.validate().map_err(|e| HarnessError::InvalidPlan(format!("{}: {e}", cfg.algorithm())))?;
        }
        self.space.validate()?;
        Ok(())
    }
}

fn first_duplicate<T: PartialEq + Copy>(xs: &[T]) -> Option<T> {
    xs.iter().enumerate().find(|(i, x)| xs[..*i].contains(x)).map(|(_, x)| *x)
}

/// Outcome of one seeded fit.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub fit: f64,
    /// `None` when the test window is empty.
    pub test: Option<f64>,
    pub time_ms: f64,
    pub iter_of_best: usize,
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub outcome: Result<RunSummary, String>,
}

/// Aggregates over the successful runs of a cell. A statistic is `None`
/// when no run produced it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CellStats {
    pub fit_median: Option<f64>,
    pub fit_min: Option<f64>,
    pub fit_mean: Option<f64>,
    pub test_median: Option<f64>,
    pub time_ms_median: Option<f64>,
    pub iters_median: Option<f64>,
    pub best_a: Option<f64>,
    pub best_b: Option<f64>,
}

impl CellStats {
    pub fn from_runs(runs: &[RunRecord]) -> Self {
        let ok: Vec<&RunSummary> = runs.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
        if ok.is_empty() {
            return CellStats::default();
        }
        let fits: Vec<f64> = ok.iter().map(|r| r.fit).collect();
        let tests: Vec<f64> = ok.iter().filter_map(|r| r.test).collect();
        let times: Vec<f64> = ok.iter().map(|r| r.time_ms).collect();
        let iters: Vec<f64> = ok.iter().map(|r| r.iter_of_best as f64).collect();
        // first run wins ties, so the choice does not depend on scheduling
        let best = ok.iter().fold(ok[0], |b, r| if r.fit < b.fit { r } else { b });
        CellStats {
            fit_median: median(&fits),
            fit_min: fits.iter().copied().reduce(f64::min),
            fit_mean: Some(fits.iter().sum::<f64>() / fits.len() as f64),
            test_median: median(&tests),
            time_ms_median: median(&times),
            iters_median: median(&iters),
            best_a: Some(best.params.a),
            best_b: Some(best.params.b),
        }
    }

    pub fn get(&self, statistic: &str) -> Option<f64> {
        match statistic {
            "fit_median" => self.fit_median,
            "fit_min" => self.fit_min,
            "fit_mean" => self.fit_mean,
            "test_median" => self.test_median,
            "time_ms_median" => self.time_ms_median,
            "iters_median" => self.iters_median,
            "best_a" => self.best_a,
            "best_b" => self.best_b,
            _ => None,
        }
    }

    pub(crate) fn slot(&mut self, statistic: &str) -> Option<&mut Option<f64>> {
        Some(match statistic {
            "fit_median" => &mut self.fit_median,
            "fit_min" => &mut self.fit_min,
            "fit_mean" => &mut self.fit_mean,
            "test_median" => &mut self.test_median,
            "time_ms_median" => &mut self.time_ms_median,
            "iters_median" => &mut self.iters_median,
            "best_a" => &mut self.best_a,
            "best_b" => &mut self.best_b,
            _ => return None,
        })
    }

    /// Copy with the wall-time statistic removed.
    pub fn without_time(&self) -> Self {
        CellStats { time_ms_median: None, ..self.clone() }
    }
}

/// Median of the values; the mean of the two middle ones for even counts.
pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub dataset: String,
    pub model: ModelKind,
    pub algorithm: Algorithm,
    /// Per-seed outcomes in plan order; empty for reports read back from CSV.
    pub runs: Vec<RunRecord>,
    pub stats: CellStats,
}

impl Cell {
    pub fn failures(&self) -> impl Iterator<Item = (u64, &str)> {
        self.runs.iter().filter_map(|r| r.outcome.as_ref().err().map(|e| (r.seed, e.as_str())))
    }
}

/// Result grid, ordered dataset, then model, then algorithm, as planned.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComparisonReport {
    pub cells: Vec<Cell>,
}

impl ComparisonReport {
    pub fn cell(&self, dataset: &str, model: ModelKind, algorithm: Algorithm) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.dataset == dataset && c.model == model && c.algorithm == algorithm)
    }

    pub fn datasets(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !out.contains(&c.dataset.as_str()) {
                out.push(&c.dataset);
            }
        }
        out
    }
}

fn run_one(
    obj: &Objective,
    test: Option<&Objective>,
    space: &SearchSpace,
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<RunSummary, String> {
    let res = minimize(obj, space, cfg, seed).map_err(|e| e.to_string())?;
    let test = match test {
        Some(t) => Some(t.evaluate(&res.best_params).map_err(|e| format!("test window: {e}"))?),
        None => None,
    };
    Ok(RunSummary {
        fit: res.best_fitness,
        test,
        time_ms: res.wall_time_ms,
        iter_of_best: res.iter_of_best,
        params: res.best_params,
    })
}

/// Runs every (dataset, model, algorithm, seed) combination.
///
/// `jobs` bounds the worker threads; `None` uses rayon's global pool and
/// `Some(1)` runs everything serially on the calling thread. The report is
/// identical for any degree of parallelism apart from wall times.
pub fn run_plan(plan: &ExperimentPlan, jobs: Option<usize>) -> Result<ComparisonReport, HarnessError> {
    plan.validate()?;
    let mut windows = Vec::with_capacity(plan.datasets.len());
    for d in &plan.datasets {
        let split = split_chronological(d, plan.train_fraction)
            .map_err(|source| HarnessError::Dataset { name: d.name().to_string(), source })?;
        windows.push(split);
    }

    struct Task<'p> {
        train: Objective,
        test: Option<Objective>,
        cfg: &'p OptimizerConfig,
        dataset: &'p str,
        model: ModelKind,
    }
    let mut tasks = Vec::new();
    for (d, split) in plan.datasets.iter().zip(&windows) {
        for &model in &plan.models {
            for cfg in &plan.algorithms {
                tasks.push(Task {
                    train: Objective::new(model, &split.train, plan.metric),
                    test: (!split.test.is_empty()).then(|| Objective::new(model, &split.test, plan.metric)),
                    cfg,
                    dataset: d.name(),
                    model,
                });
            }
        }
    }
    let jobs_list: Vec<(usize, u64)> = (0..tasks.len())
        .flat_map(|t| plan.seeds.iter().map(move |&s| (t, s)))
        .collect();
    let work = |&(t, seed): &(usize, u64)| {
        let task = &tasks[t];
        RunRecord {
            seed,
            outcome: run_one(&task.train, task.test.as_ref(), &plan.space, task.cfg, seed),
        }
    };
    let records: Vec<RunRecord> = match jobs {
        Some(1) => jobs_list.iter().map(work).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::InvalidPlan(format!("cannot start {n} workers: {e}")))?
            .install(|| jobs_list.par_iter().map(work).collect()),
        None => jobs_list.par_iter().map(work).collect(),
    };

    let per = plan.seeds.len();
    let cells = tasks
        .iter()
        .zip(records.chunks(per))
        .map(|(task, runs)| Cell {
            dataset: task.dataset.to_string(),
            model: task.model,
            algorithm: task.cfg.algorithm(),
            stats: CellStats::from_runs(runs),
            runs: runs.to_vec(),
        })
        .collect();
    Ok(ComparisonReport { cells })
}

/// The `i`-th of `n` evenly spaced values from `lo` to `hi`, hitting both
/// endpoints exactly.
pub fn grid_value(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
    }
}

/// Exhaustive search over a `resolution_a × resolution_b` grid covering
/// `space` including its edges. Rows run along `a`; on ties the first
/// point in row-major order wins.
pub fn grid_oracle<C: Cost + ?Sized>(
    obj: &C,
    space: &SearchSpace,
    resolution_a: usize,
    resolution_b: usize,
) -> Result<(Params, f64), HarnessError> {
    if resolution_a < 2 {
        return Err(HarnessError::Resolution { axis: 'a', value: resolution_a });
    }
    if resolution_b < 2 {
        return Err(HarnessError::Resolution { axis: 'b', value: resolution_b });
    }
    space.validate()?;
    let bs: Vec<f64> = (0..resolution_b)
        .map(|j| grid_value(space.b_min, space.b_max, j, resolution_b))
        .collect();
    let row_best = |i: usize| {
        let a = grid_value(space.a_min, space.a_max, i, resolution_a);
        let mut best = (Params { a, b: bs[0] }, f64::INFINITY);
        let mut seen = false;
        for &b in &bs {
            let p = Params { a, b };
            let mut v = obj.cost(&p);
            if v.is_nan() {
                v = f64::INFINITY;
            }
            if !seen || v < best.1 {
                best = (p, v);
                seen = true;
            }
        }
        best
    };
    let rows: Vec<(Params, f64)> = (0..resolution_a).into_par_iter().map(row_best).collect();
    let mut best = rows[0];
    for r in &rows[1..] {
        if r.1 < best.1 {
            best = *r;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, SyntheticMode};
    use crate::models::default_bounds;

    fn go_data() -> FailureDataset {
        let times: Vec<f64> = (1..=30).map(f64::from).collect();
        generate_synthetic(
            ModelKind::GoExponential,
            Params::new(500.0, 0.05).unwrap(),
            &times,
            SyntheticMode::Deterministic,
            0,
        )
        .unwrap()
    }

    fn plan(seeds: Vec<u64>) -> ExperimentPlan {
        ExperimentPlan {
            datasets: vec![go_data()],
            models: vec![ModelKind::GoExponential],
            algorithms: vec![Algorithm::Pso.default_config()],
            train_fraction: 0.7,
            metric: Metric::Rmse,
            seeds,
            space: default_bounds(),
        }
    }

    #[test]
    fn median_handles_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn one_cell_aggregates_every_seed() {
        let report = run_plan(&plan(vec![1, 2, 3]), Some(1)).unwrap();
        assert_eq!(report.cells.len(), 1);
        let cell = &report.cells[0];
        assert_eq!(cell.runs.len(), 3);
        let fits: Vec<f64> = cell.runs.iter().map(|r| r.outcome.as_ref().unwrap().fit).collect();
        assert_eq!(cell.stats.fit_min, fits.iter().copied().reduce(f64::min));
        assert_eq!(cell.stats.fit_median, median(&fits));
        assert!(cell.stats.test_median.is_some());
    }

    #[test]
    fn parallel_and_serial_agree() {
        let mut p = plan(vec![5, 6, 7, 8]);
        p.models = ModelKind::ALL.to_vec();
        p.algorithms = Algorithm::ALL.iter().map(|a| a.default_config()).collect();
        let serial = run_plan(&p, Some(1)).unwrap();
        let parallel = run_plan(&p, Some(4)).unwrap();
        assert_eq!(serial.cells.len(), 16);
        for (s, q) in serial.cells.iter().zip(&parallel.cells) {
            assert_eq!(s.stats.without_time(), q.stats.without_time());
        }
    }

    #[test]
    fn full_training_has_no_test_statistic() {
        let mut p = plan(vec![1]);
        p.train_fraction = 1.0;
        let report = run_plan(&p, Some(1)).unwrap();
        assert_eq!(report.cells[0].stats.test_median, None);
    }

    #[test]
    fn invalid_plans_are_rejected() {
        assert!(matches!(run_plan(&plan(vec![]), None), Err(HarnessError::InvalidPlan(_))));
        assert!(matches!(run_plan(&plan(vec![1, 1]), None), Err(HarnessError::InvalidPlan(_))));
        let mut p = plan(vec![1]);
        p.algorithms.clear();
        assert!(matches!(run_plan(&p, None), Err(HarnessError::InvalidPlan(_))));
    }

    #[test]
    fn run_failures_are_recorded() {
        let mut p = plan(vec![1, 2]);
        // every point of this space overflows the model
        p.space = SearchSpace::new(1e300, f64::MAX, 1e300, f64::MAX).unwrap();
        p.models = vec![ModelKind::Power];
        let report = run_plan(&p, Some(1)).unwrap();
        let cell = &report.cells[0];
        assert_eq!(cell.failures().count(), 2);
        assert_eq!(cell.stats, CellStats::default());
    }

    #[test]
    fn oracle_constant_picks_first_corner() {
        let f = |_: &Params| 1.0;
        let space = default_bounds();
        let (p, v) = grid_oracle(&f, &space, 5, 7).unwrap();
        assert_eq!((p.a, p.b, v), (space.a_min, space.b_min, 1.0));
    }

    #[test]
    fn oracle_hits_bowl_node() {
        let f = |p: &Params| (p.a - 30.0).powi(2) + (p.b - 0.5).powi(2);
        let space = SearchSpace::new(10.0, 50.0, 0.25, 0.75).unwrap();
        let (p, v) = grid_oracle(&f, &space, 41, 21).unwrap();
        assert_eq!((p.a, p.b, v), (30.0, 0.5, 0.0));
    }

    #[test]
    fn oracle_recovers_generator_on_grid() {
        let obj = Objective::new(ModelKind::GoExponential, &go_data(), Metric::Rmse);
        let space = SearchSpace::new(400.0, 600.0, 0.01, 0.09).unwrap();
        let (p, v) = grid_oracle(&obj, &space, 201, 81).unwrap();
        assert_eq!((p.a, p.b, v), (500.0, 0.05, 0.0));
    }

    #[test]
    fn oracle_rejects_coarse_grids() {
        let f = |_: &Params| 0.0;
        assert!(matches!(
            grid_oracle(&f, &default_bounds(), 1, 5),
            Err(HarnessError::Resolution { axis: 'a', value: 1 })
        ));
        assert!(grid_oracle(&f, &default_bounds(), 2, 2).is_ok());
    }

    #[test]
    fn grid_hits_both_ends() {
        assert_eq!(grid_value(0.1, 0.7, 0, 4), 0.1);
        assert_eq!(grid_value(0.1, 0.7, 3, 4), 0.7);
    }
}
