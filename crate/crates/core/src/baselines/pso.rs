//! Inertia-weight particle swarm optimization on a box, with velocity
//! clamping and reflection at the bounds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::{uniform_in, BaselineConfig, BaselineResult, Objective, Recorder};
use crate::error::Result;

struct Particle {
    position: Vec<f64>,
    velocity: Vec<f64>,
    best_position: Vec<f64>,
    best_reward: f64,
}

/// PSO (maximizing). Deterministic under a fixed `config.seed`; the first
/// particle starts at `x0` (clamped into the box).
pub fn pso<O: Objective>(
    objective: &mut O,
    x0: &[f64],
    config: &BaselineConfig,
) -> Result<BaselineResult> {
    config.validate()?;
    let n = x0.len();
    assert!(n >= 1, "dimension must be >= 1");
    let (lo, hi) = config.bounds;
    let v_max = (hi - lo) / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rec = Recorder::new(objective, config.budget);

    let mut swarm: Vec<Particle> = (0..config.pso_swarm)
        .map(|i| {
            let position: Vec<f64> = if i == 0 {
                x0.iter().map(|x| x.clamp(lo, hi)).collect()
            } else {
                (0..n).map(|_| uniform_in(lo, hi, &mut rng)).collect()
            };
            let velocity: Vec<f64> = (0..n).map(|_| uniform_in(-v_max, v_max, &mut rng)).collect();
            Particle {
                best_position: position.clone(),
                position,
                velocity,
                best_reward: f64::NEG_INFINITY,
            }
        })
        .collect();

    let mut global_best: Vec<f64> = swarm[0].position.clone();
    let mut global_reward = f64::NEG_INFINITY;

    'outer: loop {
        for p in &mut swarm {
            let Some(reward) = rec.try_eval(&p.position) else {
                break 'outer;
            };
            if reward > p.best_reward {
                p.best_reward = reward;
                p.best_position = p.position.clone();
            }
            if reward > global_reward {
                global_reward = reward;
                global_best = p.position.clone();
            }
        }
        for p in &mut swarm {
            for d in 0..n {
                let r1: f64 = uniform_in(0.0, 1.0, &mut rng);
                let r2: f64 = uniform_in(0.0, 1.0, &mut rng);
                let v = config.pso_inertia * p.velocity[d]
                    + config.pso_accel * r1 * (p.best_position[d] - p.position[d])
                    + config.pso_accel * r2 * (global_best[d] - p.position[d]);
                p.velocity[d] = v.clamp(-v_max, v_max);
                let mut x = p.position[d] + p.velocity[d];
                // Reflect at the box walls and reverse the velocity.
                if x < lo {
                    x = (2.0 * lo - x).min(hi);
                    p.velocity[d] = -p.velocity[d];
                } else if x > hi {
                    x = (2.0 * hi - x).max(lo);
                    p.velocity[d] = -p.velocity[d];
                }
                p.position[d] = x;
            }
        }
    }
    Ok(rec.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::FnObjective;

    fn sphere(c: Vec<f64>) -> impl FnMut(&[f64]) -> f64 {
        move |x: &[f64]| {
            let d = c.len() as f64;
            let dist2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
            1.0 - dist2 / d
        }
    }

    #[test]
    fn sphere_10d_reaches_1e4_within_10000_evaluations() {
        let c = vec![0.8; 10];
        let mut obj = FnObjective::new(10, sphere(c));
        let cfg = BaselineConfig::new(10_000).with_seed(2);
        let result = pso(&mut obj, &[0.5; 10], &cfg).unwrap();
        assert!(
            result.best_reward > 1.0 - 1e-4,
            "best reward {}",
            result.best_reward
        );
    }

    #[test]
    fn particles_stay_in_the_box() {
        let mut obj = FnObjective::new(4, |x: &[f64]| {
            for v in x {
                assert!((0.0..=4.0).contains(v), "out of box: {v}");
            }
            x.iter().sum::<f64>() / 16.0
        });
        let cfg = BaselineConfig::new(2000).with_seed(9);
        pso(&mut obj, &[1.0; 4], &cfg).unwrap();
    }

    #[test]
    fn seed_determinism() {
        let run = |seed| {
            let mut obj = FnObjective::new(5, sphere(vec![0.3; 5]));
            pso(&mut obj, &[0.5; 5], &BaselineConfig::new(800).with_seed(seed)).unwrap()
        };
        let a = run(4);
        let b = run(4);
        let c = run(5);
        assert_eq!(a.trace, b.trace);
        assert_ne!(a.trace, c.trace);
    }
}
