//! Continuous ant colony optimization with a solution archive.
//!
//! Baseline only. The archive holds the `k` best solutions found, ranked by
//! fitness. Each ant picks an archive member `l` with probability
//! proportional to `exp(-(rank_l)² / (2 q² k²))`, then samples every
//! coordinate from a Gaussian centred on that member with standard deviation
//! `ξ · mean |x_e - x_l|` over the other members. New ants join the archive,
//! which is re-ranked and truncated back to `k`.

use rand::Rng as _;
use rand_distr::{Distribution, Normal};

use super::{require, require_count, require_rate, Candidate, Evaluator, Trace};
use crate::fitness::Cost;
use crate::models::SearchSpace;
use crate::Rng;

/// Lower bound on the kernel deviation, relative to the bound width.
pub const DEVIATION_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct AcoConfig {
    pub archive_size: usize,
    /// `q`: small values concentrate sampling on the best-ranked members.
    pub locality: f64,
    /// `ξ`: deviation ratio, akin to pheromone evaporation.
    pub deviation_ratio: f64,
    pub ants: usize,
    pub max_iter: usize,
}

impl Default for AcoConfig {
    fn default() -> Self {
        AcoConfig {
            archive_size: 10,
            locality: 0.1,
            deviation_ratio: 0.85,
            ants: 10,
            max_iter: 100,
        }
    }
}

impl AcoConfig {
    pub fn validate(&self) -> Result<(), super::OptimizeError> {
        require_count("archive_size", self.archive_size)?;
        require_count("ants", self.ants)?;
        require_count("max_iter", self.max_iter)?;
        require_rate("locality", self.locality)?;
        require(self.locality > 0.0, || "locality must be positive".into())?;
        require_rate("deviation_ratio", self.deviation_ratio)
    }

    /// Normalized selection probabilities for archive ranks `0..k`.
    pub fn rank_weights(&self) -> Vec<f64> {
        let k = self.archive_size as f64;
        let qk = self.locality * k;
        let raw: Vec<f64> = (0..self.archive_size)
            .map(|rank| {
                let r = rank as f64;
                (-(r * r) / (2.0 * qk * qk)).exp()
            })
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / total).collect()
    }
}

fn pick(weights: &[f64], rng: &mut Rng) -> usize {
    let mut u: f64 = rng.random();
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

/// Kernel deviation per coordinate around archive member `l`.
pub fn kernel_deviation(archive: &[Candidate], l: usize, xi: f64, space: &SearchSpace) -> [f64; 2] {
    let width = space.width();
    let centre = archive[l].position();
    let others = archive.len().saturating_sub(1).max(1) as f64;
    [0, 1].map(|k| {
        let spread: f64 = archive
            .iter()
            .map(|c| (c.position()[k] - centre[k]).abs())
            .sum::<f64>()
            / others;
        (xi * spread).max(DEVIATION_FLOOR * width[k])
    })
}

/// Samples `cfg.ants` new solutions from the archive, merges them, and keeps
/// the best `archive_size`. The archive must be sorted by fitness on entry
/// and stays sorted on exit.
pub fn step<C: Cost + ?Sized>(
    archive: &mut Vec<Candidate>,
    eval: &mut Evaluator<'_, C>,
    space: &SearchSpace,
    cfg: &AcoConfig,
    weights: &[f64],
    rng: &mut Rng,
) {
    let mut ants = Vec::with_capacity(cfg.ants);
    for _ in 0..cfg.ants {
        let l = pick(&weights[..archive.len()], rng);
        let centre = archive[l].position();
        let sigma = kernel_deviation(archive, l, cfg.deviation_ratio, space);
        let x = [0, 1].map(|k| {
            Normal::new(centre[k], sigma[k])
                .expect("finite positive deviation")
                .sample(rng)
        });
        ants.push(eval.eval_position(space.clamp(x)));
    }
    archive.extend(ants);
    // stable sort keeps incumbents ahead of equally fit newcomers
    archive.sort_by(|x, y| x.fitness.total_cmp(&y.fitness));
    archive.truncate(cfg.archive_size);
}

pub(crate) fn run<C: Cost + ?Sized>(
    eval: &mut Evaluator<'_, C>,
    space: &SearchSpace,
    cfg: &AcoConfig,
    rng: &mut Rng,
    trace: &mut Trace,
) {
    let mut archive: Vec<Candidate> = (0..cfg.archive_size)
        .map(|_| eval.eval_position(super::uniform_point(space, rng)))
        .collect();
    archive.sort_by(|x, y| x.fitness.total_cmp(&y.fitness));
    let weights = cfg.rank_weights();
    for _ in 0..cfg.max_iter {
        step(&mut archive, eval, space, cfg, &weights, rng);
        trace.record(eval);
    }
}
