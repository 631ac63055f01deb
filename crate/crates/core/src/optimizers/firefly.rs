//! Firefly algorithm.

use rand::Rng as _;

use super::{require, require_count, require_non_negative, require_rate, Candidate, Evaluator, Trace};
use crate::fitness::Cost;
use crate::models::SearchSpace;
use crate::Rng;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct FireflyConfig {
    pub n_fireflies: usize,
    pub dimensions: usize,
    pub max_iter: usize,
    /// `α`: randomization scale, as a fraction of the bound width.
    pub alpha: f64,
    /// `β₀`: attractiveness at distance zero.
    pub beta0: f64,
    /// `γ`: light absorption coefficient.
    pub gamma: f64,
    /// Per-generation multiplier applied to `α`; 1 keeps it constant.
    pub alpha_decay: f64,
    /// Each coordinate of the attraction is scaled by a factor drawn
    /// uniformly from `[1 - j, 1 + j]`; 0 gives the plain move.
    pub attraction_jitter: f64,
}

impl Default for FireflyConfig {
    fn default() -> Self {
        FireflyConfig {
            n_fireflies: 25,
            dimensions: 2,
            max_iter: 100,
            alpha: 0.01,
            beta0: 1.0,
            gamma: 1.0,
            alpha_decay: 0.97,
            attraction_jitter: 1.0,
        }
    }
}

impl FireflyConfig {
    pub fn validate(&self) -> Result<(), super::OptimizeError> {
        require_count("n_fireflies", self.n_fireflies)?;
        require_count("max_iter", self.max_iter)?;
        require(self.dimensions == 2, || {
            format!("dimensions must be 2, got {}", self.dimensions)
        })?;
        require_rate("alpha", self.alpha)?;
        require_non_negative("beta0", self.beta0)?;
        require(!self.gamma.is_nan() && self.gamma >= 0.0, || {
            format!("gamma must be non-negative, got {}", self.gamma)
        })?;
        require_rate("attraction_jitter", self.attraction_jitter)?;
        require(self.alpha_decay > 0.0 && self.alpha_decay <= 1.0, || {
            format!("alpha_decay must lie in (0, 1], got {}", self.alpha_decay)
        })
    }
}

/// Moves `xi` toward the brighter `xj` in unit-square coordinates:
/// `xi + β₀ e^{-γ r²} (xj - xi) + α (u - ½)`, with `u` the two uniform draws.
pub fn attract(xi: [f64; 2], xj: [f64; 2], beta0: f64, gamma: f64, alpha: f64, u: [f64; 2]) -> [f64; 2] {
    let r2 = (xi[0] - xj[0]).powi(2) + (xi[1] - xj[1]).powi(2);
    let beta = if r2 == 0.0 { beta0 } else { beta0 * (-gamma * r2).exp() };
    [0, 1].map(|k| xi[k] + beta * (xj[k] - xi[k]) + alpha * (u[k] - 0.5))
}

/// One generation of the pairwise attraction sweep. `alpha` is the
/// current randomization scale.
pub fn step<C: Cost + ?Sized>(
    flies: &mut [Candidate],
    eval: &mut Evaluator<'_, C>,
    space: &SearchSpace,
    cfg: &FireflyConfig,
    alpha: f64,
    rng: &mut Rng,
) {
    let n = flies.len();
    for i in 0..n {
        let mut moved = false;
        for j in 0..n {
            if flies[j].fitness < flies[i].fitness {
                moved = true;
                let xi = space.to_unit(flies[i].position());
                let xj = space.to_unit(flies[j].position());
                let u = [rng.random::<f64>(), rng.random::<f64>()];
                let pulled = attract(xi, xj, cfg.beta0, cfg.gamma, 0.0, [0.5, 0.5]);
                let next = [0, 1].map(|k| {
                    let rho = 1.0 + cfg.attraction_jitter * (2.0 * rng.random::<f64>() - 1.0);
                    xi[k] + rho * (pulled[k] - xi[k]) + alpha * (u[k] - 0.5)
                });
                flies[i] = eval.eval_position(space.from_unit(next));
            }
        }
        if !moved {
            let xi = space.to_unit(flies[i].position());
            let u = [rng.random::<f64>(), rng.random::<f64>()];
            let walked = attract(xi, xi, 0.0, cfg.gamma, alpha, u);
            flies[i] = eval.eval_position(space.from_unit(walked));
        }
    }
}

pub(crate) fn run<C: Cost + ?Sized>(
    eval: &mut Evaluator<'_, C>,
    space: &SearchSpace,
    cfg: &FireflyConfig,
    rng: &mut Rng,
    trace: &mut Trace,
) {
    let mut flies: Vec<Candidate> = (0..cfg.n_fireflies)
        .map(|_| eval.eval_position(super::uniform_point(space, rng)))
        .collect();
    let mut alpha = cfg.alpha;
    for _ in 0..cfg.max_iter {
        step(&mut flies, eval, space, cfg, alpha, rng);
        trace.record(eval);
        alpha *= cfg.alpha_decay;
    }
}
