//! Cuckoo search with Lévy flights.
//!
//! Each generation has two phases. In the Lévy phase every nest lays one
//! egg per cuckoo by a Mantegna flight scaled by `α (x - best)`; the egg
//! replaces its host if fitter. In the discovery phase every nest except
//! the best is found by the host unless a uniform draw falls below `p_a`;
//! a found nest is rebuilt coordinate-wise, each coordinate taking with
//! probability `crossover_rate` the move
//! `r (x_p1 - x_p2) + r' (best - x)` with `r, r'` uniform and `p1, p2` two
//! random permutations of the nests. Rebuilt nests are kept only if fitter.

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::levy::{levy_step, Mantegna};
use super::{argmin, require, require_count, require_non_negative, require_rate, Candidate, Evaluator, Trace};
use crate::fitness::Cost;
use crate::models::SearchSpace;
use crate::Rng;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CuckooConfig {
    pub n_nests: usize,
    /// `p_a`: probability that a nest escapes discovery in a generation.
    pub discovery_rate: f64,
    /// `α`: Lévy step scale.
    pub alpha: f64,
    pub max_iter: usize,
    /// Lévy eggs laid per nest each generation.
    pub n_cuckoos: usize,
    /// Entries per solution, i.e. the number of model parameters.
    pub n_eggs: usize,
    /// Stability index of the Lévy steps.
    pub levy_beta: f64,
    /// Per-coordinate probability that a discovered nest's entry is rebuilt.
    pub crossover_rate: f64,
}

impl Default for CuckooConfig {
    fn default() -> Self {
        CuckooConfig {
            n_nests: 10,
            discovery_rate: 0.25,
            alpha: 0.01,
            max_iter: 100,
            n_cuckoos: 1,
            n_eggs: 2,
            levy_beta: 1.5,
            crossover_rate: 0.5,
        }
    }
}

impl CuckooConfig {
    pub fn validate(&self) -> Result<(), super::OptimizeError> {
        require_count("n_nests", self.n_nests)?;
        require_count("max_iter", self.max_iter)?;
        require_count("n_cuckoos", self.n_cuckoos)?;
        require(self.n_eggs == 2, || {
            format!("n_eggs is the solution dimensionality and must be 2, got {}", self.n_eggs)
        })?;
        require_rate("discovery_rate", self.discovery_rate)?;
        require_rate("crossover_rate", self.crossover_rate)?;
        require_non_negative("alpha", self.alpha)?;
        require(self.levy_beta > 0.0 && self.levy_beta <= 2.0, || {
            format!("levy_beta must lie in (0, 2], got {}", self.levy_beta)
        })
    }
}

/// Lévy phase: one greedy egg per nest and cuckoo.
pub fn lay_eggs<C: Cost + ?Sized>(
    nests: &mut [Candidate],
    eval: &mut Evaluator<'_, C>,
    space: &SearchSpace,
    cfg: &CuckooConfig,
    mantegna: &Mantegna,
    rng: &mut Rng,
) {
    let best = nests[argmin(nests)].params;
    for nest in nests.iter_mut() {
        for _ in 0..cfg.n_cuckoos {
            let egg = eval.eval(levy_step(nest.params, best, cfg.alpha, space, mantegna, rng));
            if egg.fitness < nest.fitness {
                *nest = egg;
            }
        }
    }
}

/// Discovery phase. The current best nest is never touched.
pub fn discover<C: Cost + ?Sized>(
    nests: &mut [Candidate],
    eval: &mut Evaluator<'_, C>,
    space: &SearchSpace,
    cfg: &CuckooConfig,
    rng: &mut Rng,
) {
    let n = nests.len();
    let best_idx = argmin(nests);
    let best = nests[best_idx].position();
    let mut p1: Vec<usize> = (0..n).collect();
    let mut p2 = p1.clone();
    p1.shuffle(rng);
    p2.shuffle(rng);
    for i in 0..n {
        if i == best_idx || rng.random::<f64>() < cfg.discovery_rate {
            continue;
        }
        let x = nests[i].position();
        let (x1, x2) = (nests[p1[i]].position(), nests[p2[i]].position());
        let mut next = x;
        let mut moved = false;
        for k in 0..2 {
            if rng.random::<f64>() < cfg.crossover_rate {
                moved = true;
                let r: f64 = rng.random();
                let r_best: f64 = rng.random();
                next[k] = x[k] + r * (x1[k] - x2[k]) + r_best * (best[k] - x[k]);
            }
        }
        if moved {
            let c = eval.eval_position(space.clamp(next));
            if c.fitness < nests[i].fitness {
                nests[i] = c;
            }
        }
    }
}

/// One generation.
pub fn step<C: Cost + ?Sized>(
    nests: &mut [Candidate],
    eval: &mut Evaluator<'_, C>,
    space: &SearchSpace,
    cfg: &CuckooConfig,
    mantegna: &Mantegna,
    rng: &mut Rng,
) {
    lay_eggs(nests, eval, space, cfg, mantegna, rng);
    discover(nests, eval, space, cfg, rng);
}

pub(crate) fn run<C: Cost + ?Sized>(
    eval: &mut Evaluator<'_, C>,
    space: &SearchSpace,
    cfg: &CuckooConfig,
    rng: &mut Rng,
    trace: &mut Trace,
) {
    let mantegna = Mantegna::new(cfg.levy_beta);
    let mut nests: Vec<Candidate> = (0..cfg.n_nests)
        .map(|_| eval.eval_position(super::uniform_point(space, rng)))
        .collect();
    for _ in 0..cfg.max_iter {
        step(&mut nests, eval, space, cfg, &mantegna, rng);
        trace.record(eval);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{default_bounds, Params};
    use rand::SeedableRng;

    fn bowl(p: &Params) -> f64 {
        (p.a - 500.0).powi(2) + (p.b - 0.5).powi(2)
    }

    fn population(eval: &mut Evaluator<'_, dyn Cost>, rng: &mut Rng, n: usize) -> Vec<Candidate> {
        let space = default_bounds();
        (0..n).map(|_| eval.eval_position(crate::optimizers::uniform_point(&space, rng))).collect()
    }

    #[test]
    fn certain_escape_means_no_discovery() {
        let f = bowl as fn(&Params) -> f64;
        let mut eval = Evaluator::<dyn Cost>::new(&f);
        let mut rng = Rng::seed_from_u64(4);
        let mut nests = population(&mut eval, &mut rng, 10);
        let before = nests.clone();
        let evals = eval.evaluations();
        let cfg = CuckooConfig { discovery_rate: 1.0, ..CuckooConfig::default() };
        discover(&mut nests, &mut eval, &default_bounds(), &cfg, &mut rng);
        assert_eq!(nests, before);
        assert_eq!(eval.evaluations(), evals);
    }

    #[test]
    fn zero_escape_rebuilds_all_but_the_best() {
        let f = bowl as fn(&Params) -> f64;
        let mut eval = Evaluator::<dyn Cost>::new(&f);
        let mut rng = Rng::seed_from_u64(8);
        let mut nests = population(&mut eval, &mut rng, 10);
        let best = nests[argmin(&nests)];
        let evals = eval.evaluations();
        let cfg = CuckooConfig { discovery_rate: 0.0, crossover_rate: 1.0, ..CuckooConfig::default() };
        discover(&mut nests, &mut eval, &default_bounds(), &cfg, &mut rng);
        assert_eq!(eval.evaluations() - evals, 9);
        assert!(nests.contains(&best));
    }

    #[test]
    fn zero_alpha_eggs_change_nothing() {
        let f = bowl as fn(&Params) -> f64;
        let mut eval = Evaluator::<dyn Cost>::new(&f);
        let mut rng = Rng::seed_from_u64(2);
        let mut nests = population(&mut eval, &mut rng, 10);
        let before = nests.clone();
        let cfg = CuckooConfig { alpha: 0.0, ..CuckooConfig::default() };
        lay_eggs(&mut nests, &mut eval, &default_bounds(), &cfg, &Mantegna::new(1.5), &mut rng);
        assert_eq!(nests, before);
    }

    #[test]
    fn best_nest_never_worsens() {
        let f = |p: &Params| (p.a / 100.0).sin() + (p.b * 20.0).cos() + p.a * 1e-4;
        let mut eval = Evaluator::new(&f);
        let space = default_bounds();
        let cfg = CuckooConfig::default();
        let mantegna = Mantegna::new(cfg.levy_beta);
        let mut rng = Rng::seed_from_u64(6);
        let mut nests: Vec<Candidate> = (0..cfg.n_nests)
            .map(|_| eval.eval_position(crate::optimizers::uniform_point(&space, &mut rng)))
            .collect();
        let mut best = nests[argmin(&nests)].fitness;
        for _ in 0..50 {
            step(&mut nests, &mut eval, &space, &cfg, &mantegna, &mut rng);
            let now = nests[argmin(&nests)].fitness;
            assert!(now <= best);
            assert!(nests.iter().all(|c| space.contains(&c.params)));
            best = now;
        }
    }

    #[test]
    fn converges_on_a_bowl() {
        let f = bowl as fn(&Params) -> f64;
        let space = default_bounds();
        let cfg = super::super::OptimizerConfig::Cuckoo(CuckooConfig::default());
        let res = super::super::minimize(&f, &space, &cfg, 17).unwrap();
        assert!(res.best_fitness < 1e-2, "{}", res.best_fitness);
    }
}
