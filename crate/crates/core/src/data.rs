//! Cumulative failure datasets: CSV ingest, chronological splits, and
//! synthetic generation from a known model.

use std::io::{BufRead, BufReader, Read, Write};

use rand::SeedableRng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

use crate::models::{mean_value, ModelError, ModelKind, Params};
use crate::Rng;

pub const MIN_POINTS: usize = 3;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("dataset has {0} points, at least {MIN_POINTS} are required")]
    TooFewPoints(usize),
    #[error("point {index}: {message}")]
    Invalid { index: usize, message: String },
    #[error("train fraction must lie in (0, 1], got {0}")]
    InvalidFraction(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One observation: cumulative failures seen by `time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailurePoint {
    pub time: f64,
    pub failures: f64,
}

/// An ordered series of cumulative failure counts.
///
/// Times are strictly increasing and positive; counts are non-negative and
/// non-decreasing. Counts are stored as reals so they compare directly with
/// model predictions.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureDataset {
    name: String,
    points: Vec<FailurePoint>,
}

impl FailureDataset {
    /// Builds a validated dataset with at least [`MIN_POINTS`] points.
    pub fn new(name: impl Into<String>, points: Vec<FailurePoint>) -> Result<Self, DataError> {
        if points.len() < MIN_POINTS {
            return Err(DataError::TooFewPoints(points.len()));
        }
        validate_points(&points)?;
        Ok(FailureDataset { name: name.into(), points })
    }

    /// Like [`FailureDataset::new`] but allows any length, including empty.
    /// Used for the pieces of a split.
    fn window(name: String, points: Vec<FailurePoint>) -> Self {
        FailureDataset { name, points }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[FailurePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.time)
    }

    pub fn failures(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.failures)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

fn validate_points(points: &[FailurePoint]) -> Result<(), DataError> {
    for (i, p) in points.iter().enumerate() {
        let bad = |message: String| DataError::Invalid { index: i, message };
        if !p.time.is_finite() || p.time <= 0.0 {
            return Err(bad(format!("time must be finite and positive, got {}", p.time)));
        }
        if !p.failures.is_finite() || p.failures < 0.0 {
            return Err(bad(format!(
                "failure count must be finite and non-negative, got {}",
                p.failures
            )));
        }
        if i > 0 {
            let prev = points[i - 1];
            if p.time <= prev.time {
                return Err(bad(format!(
                    "time {} does not increase past {}",
                    p.time, prev.time
                )));
            }
            if p.failures < prev.failures {
                return Err(bad(format!(
                    "cumulative count drops from {} to {}",
                    prev.failures, p.failures
                )));
            }
        }
    }
    Ok(())
}

/// Reads a `time,failures` CSV. The header line is mandatory; blank lines are
/// skipped and CRLF line endings are accepted.
pub fn load_csv<R: Read>(name: impl Into<String>, source: R) -> Result<FailureDataset, DataError> {
    let reader = BufReader::new(source);
    let mut points = Vec::new();
    let mut saw_header = false;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r').trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| DataError::Parse { line: line_no, message };
        if !saw_header {
            let cols: Vec<_> = line.split(',').map(|c| c.trim().to_ascii_lowercase()).collect();
            let cols: Vec<_> = cols.iter().map(|c| c.trim_start_matches('\u{feff}')).collect();
            if cols != ["time", "failures"] {
                return Err(parse_err(format!(
                    "expected header `time,failures`, got `{line}`"
                )));
            }
            saw_header = true;
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 2 {
            return Err(parse_err(format!("expected 2 columns, got {}", cells.len())));
        }
        let time: f64 = cells[0]
            .parse()
            .map_err(|_| parse_err(format!("non-numeric time `{}`", cells[0])))?;
        let failures: f64 = cells[1]
            .parse()
            .map_err(|_| parse_err(format!("non-numeric failure count `{}`", cells[1])))?;
        if let Some(prev) = points.last() {
            let prev: &FailurePoint = prev;
            if time <= prev.time {
                return Err(parse_err(format!(
                    "time {time} does not increase past {}",
                    prev.time
                )));
            }
            if failures < prev.failures {
                return Err(parse_err(format!(
                    "cumulative count drops from {} to {failures}",
                    prev.failures
                )));
            }
        }
        points.push(FailurePoint { time, failures });
    }
    if !saw_header {
        return Err(DataError::Parse {
            line: 1,
            message: "missing header `time,failures`".into(),
        });
    }
    FailureDataset::new(name, points)
}

/// Writes the dataset in the format [`load_csv`] reads. Values use Rust's
/// shortest round-trip formatting, so reloading is bit-exact.
pub fn write_csv<W: Write>(d: &FailureDataset, mut out: W) -> Result<(), DataError> {
    writeln!(out, "time,failures")?;
    for p in &d.points {
        writeln!(out, "{:?},{:?}", p.time, p.failures)?;
    }
    Ok(())
}

/// Training window and held-out tail of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSplit {
    pub train: FailureDataset,
    pub test: FailureDataset,
}

/// Splits the first `round(fraction · n)` points (at least one) into the
/// training window and the rest into the test window. Halves round up.
pub fn split_chronological(d: &FailureDataset, train_fraction: f64) -> Result<DataSplit, DataError> {
    if !(train_fraction > 0.0 && train_fraction <= 1.0) {
        return Err(DataError::InvalidFraction(train_fraction));
    }
    let n = d.len();
    let n_train = ((train_fraction * n as f64 + 0.5).floor() as usize).clamp(1, n);
    let (train, test) = d.points.split_at(n_train);
    Ok(DataSplit {
        train: FailureDataset::window(d.name.clone(), train.to_vec()),
        test: FailureDataset::window(d.name.clone(), test.to_vec()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticMode {
    /// Counts equal `μ(t_i)` exactly.
    Deterministic,
    /// Counts are an NHPP realisation: independent Poisson increments with
    /// means `μ(t_i) - μ(t_{i-1})`.
    Poisson,
}

impl std::str::FromStr for SyntheticMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "deterministic" | "exact" => Ok(SyntheticMode::Deterministic),
            "poisson" | "nhpp" => Ok(SyntheticMode::Poisson),
            _ => Err(format!("unknown mode '{s}', expected deterministic or poisson")),
        }
    }
}

/// Generates a dataset from a known model at the given observation times.
pub fn generate_synthetic(
    kind: ModelKind,
    p: Params,
    times: &[f64],
    mode: SyntheticMode,
    seed: u64,
) -> Result<FailureDataset, DataError> {
    p.validate()?;
    let mut rng = Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(times.len());
    let mut prev_mu = 0.0;
    let mut count = 0.0;
    for (i, &t) in times.iter().enumerate() {
        if !t.is_finite() || t <= 0.0 {
            return Err(DataError::Invalid {
                index: i,
                message: format!("time must be finite and positive, got {t}"),
            });
        }
        let mu = mean_value(kind, p, t)?;
        let failures = match mode {
            SyntheticMode::Deterministic => mu,
            SyntheticMode::Poisson => {
                let increment = (mu - prev_mu).max(0.0);
                if increment > 0.0 {
                    let dist = Poisson::new(increment).map_err(|e| DataError::Invalid {
                        index: i,
                        message: format!("cannot sample Poisson({increment}): {e}"),
                    })?;
                    count += dist.sample(&mut rng);
                }
                count
            }
        };
        prev_mu = mu;
        points.push(FailurePoint { time: t, failures });
    }
    let name = format!("synthetic-{}", kind.name());
    FailureDataset::new(name, points)
}
