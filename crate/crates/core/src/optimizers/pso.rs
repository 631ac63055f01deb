//! Global-best particle swarm optimization.
//!
//! Baseline only. The inertia and acceleration coefficients default to the
//! constriction-equivalent values `w = 0.729`, `c1 = c2 = 1.49445`.

use rand::Rng as _;

use super::{require, require_count, require_non_negative, Candidate, Evaluator, Trace};
use crate::fitness::Cost;
use crate::models::SearchSpace;
use crate::Rng;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub max_iter: usize,
    /// Velocity limit per coordinate as a fraction of the bound width.
    pub velocity_clamp: f64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            swarm_size: 20,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
            max_iter: 100,
            velocity_clamp: 0.2,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<(), super::OptimizeError> {
        require_count("swarm_size", self.swarm_size)?;
        require_count("max_iter", self.max_iter)?;
        require_non_negative("inertia", self.inertia)?;
        require_non_negative("cognitive", self.cognitive)?;
        require_non_negative("social", self.social)?;
        require(self.velocity_clamp > 0.0 && self.velocity_clamp <= 1.0, || {
            format!("velocity_clamp must lie in (0, 1], got {}", self.velocity_clamp)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub current: Candidate,
    pub velocity: [f64; 2],
    pub personal_best: Candidate,
}

/// One velocity/position update of every particle followed by evaluation.
/// `global_best` is updated in place.
pub fn step<C: Cost + ?Sized>(
    swarm: &mut [Particle],
    global_best: &mut Candidate,
    eval: &mut Evaluator<'_, C>,
    space: &SearchSpace,
    cfg: &PsoConfig,
    rng: &mut Rng,
) {
    let width = space.width();
    let vmax = [cfg.velocity_clamp * width[0], cfg.velocity_clamp * width[1]];
    for particle in swarm.iter_mut() {
        let x = particle.current.position();
        let pb = particle.personal_best.position();
        let gb = global_best.position();
        let mut next = x;
        for k in 0..2 {
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            let v = cfg.inertia * particle.velocity[k]
                + cfg.cognitive * r1 * (pb[k] - x[k])
                + cfg.social * r2 * (gb[k] - x[k]);
            particle.velocity[k] = v.clamp(-vmax[k], vmax[k]);
            next[k] = x[k] + particle.velocity[k];
        }
        let next = space.clamp(next);
        particle.current = if next == x {
            particle.current
        } else {
            eval.eval_position(next)
        };
        if particle.current.fitness < particle.personal_best.fitness {
            particle.personal_best = particle.current;
        }
        if particle.personal_best.fitness < global_best.fitness {
            *global_best = particle.personal_best;
        }
    }
}

pub(crate) fn run<C: Cost + ?Sized>(
    eval: &mut Evaluator<'_, C>,
    space: &SearchSpace,
    cfg: &PsoConfig,
    rng: &mut Rng,
    trace: &mut Trace,
) {
    let width = space.width();
    let mut swarm: Vec<Particle> = (0..cfg.swarm_size)
        .map(|_| {
            let cand = eval.eval_position(super::uniform_point(space, rng));
            let velocity = [0, 1].map(|k| {
                cfg.velocity_clamp * width[k] * (2.0 * rng.random::<f64>() - 1.0)
            });
            Particle { current: cand, velocity, personal_best: cand }
        })
        .collect();
    let mut global_best = swarm[0].personal_best;
    for p in &swarm {
        if p.personal_best.fitness < global_best.fitness {
            global_best = p.personal_best;
        }
    }
    for _ in 0..cfg.max_iter {
        step(&mut swarm, &mut global_best, eval, space, cfg, rng);
        trace.record(eval);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{default_bounds, Params};
    use rand::SeedableRng;

    fn particle(f: &impl Fn(&Params) -> f64, x: [f64; 2]) -> Particle {
        let params = Params::from_array(x);
        let c = Candidate { params, fitness: f(&params) };
        Particle { current: c, velocity: [0.0, 0.0], personal_best: c }
    }

    #[test]
    fn frozen_swarm_stays_put() {
        let f = |p: &Params| (p.a - 500.0).powi(2) + (p.b - 0.5).powi(2);
        let mut eval = Evaluator::new(&f);
        let space = default_bounds();
        let cfg = PsoConfig { inertia: 0.0, cognitive: 0.0, social: 0.0, ..PsoConfig::default() };
        let mut swarm = vec![particle(&f, [10.0, 0.1]), particle(&f, [900.0, 0.7])];
        let before = swarm.clone();
        let mut gbest = swarm[1].current;
        let mut rng = Rng::seed_from_u64(0);
        step(&mut swarm, &mut gbest, &mut eval, &space, &cfg, &mut rng);
        assert_eq!(swarm, before);
    }

    #[test]
    fn particle_at_its_own_best_stays() {
        let f = |p: &Params| (p.a - 500.0).powi(2) + (p.b - 0.5).powi(2);
        let mut eval = Evaluator::new(&f);
        let space = default_bounds();
        let cfg = PsoConfig { inertia: 0.7, social: 0.0, ..PsoConfig::default() };
        let mut swarm = vec![particle(&f, [123.0, 0.3])];
        let mut gbest = swarm[0].current;
        let mut rng = Rng::seed_from_u64(5);
        for _ in 0..10 {
            step(&mut swarm, &mut gbest, &mut eval, &space, &cfg, &mut rng);
        }
        assert_eq!(swarm[0].current.position(), [123.0, 0.3]);
    }

    #[test]
    fn velocities_respect_clamp() {
        let f = |p: &Params| -p.a;
        let mut eval = Evaluator::new(&f);
        let space = default_bounds();
        let cfg = PsoConfig { inertia: 5.0, ..PsoConfig::default() };
        let mut swarm = vec![particle(&f, [1.0, 0.1]), particle(&f, [1999.0, 0.9])];
        swarm[0].velocity = [1e6, 1e6];
        let mut gbest = swarm[1].current;
        let mut rng = Rng::seed_from_u64(3);
        step(&mut swarm, &mut gbest, &mut eval, &space, &cfg, &mut rng);
        for p in &swarm {
            assert!(p.velocity[0].abs() <= 0.2 * space.width()[0] + 1e-9);
            assert!(space.contains(&p.current.params));
        }
    }
}
