//! Heavy-tailed Lévy steps via Mantegna's algorithm.
//!
//! A step is `u / |v|^{1/β}` with `u ~ N(0, σ_u²)`, `v ~ N(0, 1)` and
//! `σ_u = [Γ(1+β) sin(πβ/2) / (Γ((1+β)/2) β 2^{(β-1)/2})]^{1/β}`. Its tails
//! decay like `|s|^{-1-β}`, the power law `u = t^{-λ}` with `λ = 1 + β`.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::gamma;

use crate::models::{Params, SearchSpace};

/// Stability index used for cuckoo flights.
pub const DEFAULT_BETA: f64 = 1.5;

#[derive(Debug, Clone, Copy)]
pub struct Mantegna {
    beta: f64,
    sigma_u: f64,
}

impl Mantegna {
    /// `beta` must lie in `(0, 2]`.
    pub fn new(beta: f64) -> Self {
        assert!(beta > 0.0 && beta <= 2.0, "stability index out of range: {beta}");
        let num = gamma(1.0 + beta) * (PI * beta / 2.0).sin();
        let den = gamma((1.0 + beta) / 2.0) * beta * 2f64.powf((beta - 1.0) / 2.0);
        Mantegna { beta, sigma_u: (num / den).powf(1.0 / beta) }
    }

    pub fn sigma_u(&self) -> f64 {
        self.sigma_u
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample::<f64, _>(StandardNormal) * self.sigma_u;
        let v: f64 = rng.sample(StandardNormal);
        u / v.abs().powf(1.0 / self.beta)
    }
}

impl Default for Mantegna {
    fn default() -> Self {
        Mantegna::new(DEFAULT_BETA)
    }
}

impl Distribution<f64> for Mantegna {
    fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Mantegna::sample(self, rng)
    }
}

/// One Lévy flight from `current`, scaled by `alpha` and directed by the
/// offset from `best`:
///
/// `x' = x + α · L ⊙ (x - best) ⊙ z`, with `L` Mantegna and `z ~ N(0, 1)`
/// per coordinate, clamped to `space`.
///
/// The offset makes step lengths shrink as the population contracts around
/// the best nest, and `L` supplies occasional long jumps. When `current` is
/// the best nest the offset is zero, so a fallback offset of one bound width
/// per coordinate keeps the best nest exploring instead of stalling.
pub fn levy_step<R: rand::Rng + ?Sized>(
    current: Params,
    best: Params,
    alpha: f64,
    space: &SearchSpace,
    mantegna: &Mantegna,
    rng: &mut R,
) -> Params {
    if alpha == 0.0 {
        return current;
    }
    let x = current.to_array();
    let g = best.to_array();
    let width = space.width();
    let mut out = x;
    for k in 0..2 {
        let levy = mantegna.sample(rng);
        let z: f64 = rng.sample(StandardNormal);
        let offset = if x[k] == g[k] { width[k] } else { x[k] - g[k] };
        out[k] = x[k] + alpha * levy * offset * z;
    }
    Params::from_array(space.clamp(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::default_bounds;
    use crate::Rng;
    use rand::SeedableRng;

    #[test]
    fn sigma_matches_closed_form_for_three_halves() {
        // Γ(2.5) sin(3π/4) / (Γ(1.25) 1.5 2^{0.25}), raised to 2/3
        let m = Mantegna::new(1.5);
        assert!((m.sigma_u() - 0.696_574_502_557_696_8).abs() < 1e-12, "{}", m.sigma_u());
    }

    #[test]
    fn zero_alpha_is_identity() {
        let space = default_bounds();
        let mut rng = Rng::seed_from_u64(1);
        let cur = Params { a: 321.0, b: 0.4 };
        let best = Params { a: 10.0, b: 0.9 };
        let out = levy_step(cur, best, 0.0, &space, &Mantegna::default(), &mut rng);
        assert_eq!(out, cur);
    }

    #[test]
    fn seeded_steps_replay() {
        let space = default_bounds();
        let cur = Params { a: 321.0, b: 0.4 };
        let best = Params { a: 10.0, b: 0.9 };
        let run = |seed| {
            let mut rng = Rng::seed_from_u64(seed);
            (0..50)
                .map(|_| levy_step(cur, best, 0.01, &space, &Mantegna::default(), &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(9), run(9));
        assert!(run(9).iter().all(|p| space.contains(p)));
    }

    #[test]
    fn steps_are_heavy_tailed() {
        let m = Mantegna::default();
        let mut rng = Rng::seed_from_u64(2024);
        let n = 100_000;
        let steps: Vec<f64> = (0..n).map(|_| m.sample(&mut rng)).collect();
        let mean = steps.iter().sum::<f64>() / n as f64;
        let var = steps.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n as f64;
        let m4 = steps.iter().map(|s| (s - mean).powi(4)).sum::<f64>() / n as f64;
        let kurtosis = m4 / (var * var);
        assert!(kurtosis > 30.0, "kurtosis {kurtosis}");
    }

    #[test]
    fn tail_beyond_ten_medians_dwarfs_gaussian() {
        let m = Mantegna::default();
        let mut rng = Rng::seed_from_u64(77);
        let mut mags: Vec<f64> = (0..100_000).map(|_| m.sample(&mut rng).abs()).collect();
        mags.sort_by(f64::total_cmp);
        let med = mags[mags.len() / 2];
        let frac = mags.iter().filter(|&&s| s > 10.0 * med).count() as f64 / mags.len() as f64;
        // a Gaussian with the same median magnitude: median |z| = 0.6745 σ
        let gauss = statrs::function::erf::erfc(10.0 * 0.674_489_750_196_081_7 / std::f64::consts::SQRT_2);
        assert!(frac >= 10.0 * gauss, "{frac} vs {gauss}");
        assert!(frac > 1e-3, "{frac}");
    }
}
