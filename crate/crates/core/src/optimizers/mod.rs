//! Bound-constrained stochastic minimizers over `(a, b)`.
//!
//! All four searches share one driver, [`minimize`]: it seeds the PRNG,
//! counts evaluations, keeps the best point ever evaluated, records the
//! best-so-far fitness after every generation, and times the loop.

pub mod aco;
pub mod cuckoo;
pub mod firefly;
pub mod levy;
pub mod pso;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng as _, SeedableRng};
use thiserror::Error;

use crate::fitness::Cost;
use crate::models::{ModelError, Params, SearchSpace};
use crate::Rng;

pub use aco::AcoConfig;
pub use cuckoo::CuckooConfig;
pub use firefly::FireflyConfig;
pub use pso::PsoConfig;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Space(#[from] ModelError),
    #[error("objective returned no finite value in {evaluations} evaluations")]
    NoFiniteEvaluation { evaluations: usize },
    #[error("unknown algorithm '{0}', expected one of: cs, fa, pso, aco")]
    UnknownAlgorithm(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Cuckoo,
    Firefly,
    Pso,
    Aco,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Cuckoo,
        Algorithm::Firefly,
        Algorithm::Pso,
        Algorithm::Aco,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cuckoo => "cs",
            Algorithm::Firefly => "fa",
            Algorithm::Pso => "pso",
            Algorithm::Aco => "aco",
        }
    }

    pub fn default_config(self) -> OptimizerConfig {
        match self {
            Algorithm::Cuckoo => OptimizerConfig::Cuckoo(CuckooConfig::default()),
            Algorithm::Firefly => OptimizerConfig::Firefly(FireflyConfig::default()),
            Algorithm::Pso => OptimizerConfig::Pso(PsoConfig::default()),
            Algorithm::Aco => OptimizerConfig::Aco(AcoConfig::default()),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = OptimizeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cs" | "cuckoo" => Ok(Algorithm::Cuckoo),
            "fa" | "firefly" => Ok(Algorithm::Firefly),
            "pso" => Ok(Algorithm::Pso),
            "aco" => Ok(Algorithm::Aco),
            _ => Err(OptimizeError::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// Settings for one of the four searches.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "algorithm", rename_all = "lowercase"))]
pub enum OptimizerConfig {
    #[cfg_attr(feature = "serde", serde(rename = "cs"))]
    Cuckoo(CuckooConfig),
    #[cfg_attr(feature = "serde", serde(rename = "fa"))]
    Firefly(FireflyConfig),
    Pso(PsoConfig),
    Aco(AcoConfig),
}

impl OptimizerConfig {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            OptimizerConfig::Cuckoo(_) => Algorithm::Cuckoo,
            OptimizerConfig::Firefly(_) => Algorithm::Firefly,
            OptimizerConfig::Pso(_) => Algorithm::Pso,
            OptimizerConfig::Aco(_) => Algorithm::Aco,
        }
    }

    pub fn max_iter(&self) -> usize {
        match self {
            OptimizerConfig::Cuckoo(c) => c.max_iter,
            OptimizerConfig::Firefly(c) => c.max_iter,
            OptimizerConfig::Pso(c) => c.max_iter,
            OptimizerConfig::Aco(c) => c.max_iter,
        }
    }

    pub fn validate(&self) -> Result<(), OptimizeError> {
        match self {
            OptimizerConfig::Cuckoo(c) => c.validate(),
            OptimizerConfig::Firefly(c) => c.validate(),
            OptimizerConfig::Pso(c) => c.validate(),
            OptimizerConfig::Aco(c) => c.validate(),
        }
    }
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), OptimizeError> {
    if cond {
        Ok(())
    } else {
        Err(OptimizeError::InvalidConfig(msg()))
    }
}

pub(crate) fn require_count(name: &str, v: usize) -> Result<(), OptimizeError> {
    require(v >= 1, || format!("{name} must be at least 1, got {v}"))
}

pub(crate) fn require_rate(name: &str, v: f64) -> Result<(), OptimizeError> {
    require((0.0..=1.0).contains(&v), || format!("{name} must lie in [0, 1], got {v}"))
}

pub(crate) fn require_non_negative(name: &str, v: f64) -> Result<(), OptimizeError> {
    require(v.is_finite() && v >= 0.0, || {
        format!("{name} must be finite and non-negative, got {v}")
    })
}

/// A scored point of the search space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub params: Params,
    pub fitness: f64,
}

impl Candidate {
    pub fn position(&self) -> [f64; 2] {
        self.params.to_array()
    }
}

/// Wraps a cost function: counts evaluations, turns NaN into `+∞`, and
/// remembers the best point ever scored.
pub struct Evaluator<'a, C: Cost + ?Sized> {
    cost: &'a C,
    evaluations: usize,
    finite: usize,
    best: Option<Candidate>,
}

impl<'a, C: Cost + ?Sized> Evaluator<'a, C> {
    pub fn new(cost: &'a C) -> Self {
        Evaluator { cost, evaluations: 0, finite: 0, best: None }
    }

    pub fn eval(&mut self, params: Params) -> Candidate {
        let mut fitness = self.cost.cost(&params);
        if fitness.is_nan() {
            fitness = f64::INFINITY;
        }
        self.evaluations += 1;
        if fitness.is_finite() {
            self.finite += 1;
        }
        let cand = Candidate { params, fitness };
        match self.best {
            Some(b) if fitness >= b.fitness => {}
            _ => self.best = Some(cand),
        }
        cand
    }

    pub fn eval_position(&mut self, x: [f64; 2]) -> Candidate {
        self.eval(Params::from_array(x))
    }

    /// Best candidate so far. Panics before the first evaluation.
    pub fn best(&self) -> Candidate {
        self.best.expect("no evaluations yet")
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }
}

pub(crate) fn uniform_point(space: &SearchSpace, rng: &mut Rng) -> [f64; 2] {
    space.from_unit([rng.random::<f64>(), rng.random::<f64>()])
}

/// Index of the lowest-fitness candidate; the first one on ties.
pub(crate) fn argmin(pop: &[Candidate]) -> usize {
    let mut best = 0;
    for (i, c) in pop.iter().enumerate().skip(1) {
        if c.fitness < pop[best].fitness {
            best = i;
        }
    }
    best
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub best_params: Params,
    pub best_fitness: f64,
    /// Best-so-far fitness after each generation.
    pub trace: Vec<f64>,
    /// Milliseconds spent inside the search loop.
    pub wall_time_ms: f64,
    /// 1-based generation at which the final best value first appeared.
    pub iter_of_best: usize,
    pub evaluations: usize,
}

pub(crate) fn iteration_of_best(trace: &[f64]) -> usize {
    match trace.last() {
        Some(last) => trace.iter().position(|v| v == last).map_or(0, |i| i + 1),
        None => 0,
    }
}

/// Per-generation hook the drivers call; keeps the trace monotone by
/// construction since the evaluator's best never worsens.
pub(crate) struct Trace(Vec<f64>);

impl Trace {
    fn with_capacity(n: usize) -> Self {
        Trace(Vec::with_capacity(n))
    }

    pub(crate) fn record<C: Cost + ?Sized>(&mut self, eval: &Evaluator<'_, C>) {
        self.0.push(eval.best().fitness);
    }
}

/// Minimizes `obj` over `space` with the configured algorithm.
///
/// The run is a pure function of `(obj, space, cfg, seed)` apart from the
/// measured wall time.
pub fn minimize<C: Cost + ?Sized>(
    obj: &C,
    space: &SearchSpace,
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<RunResult, OptimizeError> {
    space.validate()?;
    cfg.validate()?;
    let mut rng = Rng::seed_from_u64(seed);
    let mut eval = Evaluator::new(obj);
    let mut trace = Trace::with_capacity(cfg.max_iter());

    let start = Instant::now();
    match cfg {
        OptimizerConfig::Cuckoo(c) => cuckoo::run(&mut eval, space, c, &mut rng, &mut trace),
        OptimizerConfig::Firefly(c) => firefly::run(&mut eval, space, c, &mut rng, &mut trace),
        OptimizerConfig::Pso(c) => pso::run(&mut eval, space, c, &mut rng, &mut trace),
        OptimizerConfig::Aco(c) => aco::run(&mut eval, space, c, &mut rng, &mut trace),
    }
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    if eval.finite == 0 {
        return Err(OptimizeError::NoFiniteEvaluation { evaluations: eval.evaluations });
    }
    let best = eval.best();
    let trace = trace.0;
    Ok(RunResult {
        algorithm: cfg.algorithm(),
        best_params: best.params,
        best_fitness: best.fitness,
        iter_of_best: iteration_of_best(&trace),
        trace,
        wall_time_ms,
        evaluations: eval.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::default_bounds;

    #[test]
    fn iteration_of_best_is_first_occurrence() {
        assert_eq!(iteration_of_best(&[5.0, 3.0, 3.0, 3.0]), 2);
        assert_eq!(iteration_of_best(&[1.0, 1.0]), 1);
        assert_eq!(iteration_of_best(&[]), 0);
    }

    #[test]
    fn evaluator_tracks_best_and_nan() {
        let f = |p: &Params| if p.a > 10.0 { f64::NAN } else { p.a };
        let mut e = Evaluator::new(&f);
        assert_eq!(e.eval(Params { a: 5.0, b: 1.0 }).fitness, 5.0);
        assert_eq!(e.eval(Params { a: 50.0, b: 1.0 }).fitness, f64::INFINITY);
        e.eval(Params { a: 2.0, b: 1.0 });
        e.eval(Params { a: 2.0, b: 0.5 });
        assert_eq!(e.best().params, Params { a: 2.0, b: 1.0 });
        assert_eq!(e.evaluations(), 4);
    }

    #[test]
    fn all_nan_objective_is_an_error() {
        let f = |_: &Params| f64::NAN;
        for alg in Algorithm::ALL {
            let err = minimize(&f, &default_bounds(), &alg.default_config(), 1).unwrap_err();
            assert!(matches!(err, OptimizeError::NoFiniteEvaluation { .. }), "{alg}: {err}");
        }
    }

    #[test]
    fn algorithm_names_parse() {
        for alg in Algorithm::ALL {
            assert_eq!(alg.name().parse::<Algorithm>().unwrap(), alg);
        }
        assert!("ga".parse::<Algorithm>().is_err());
    }
}
