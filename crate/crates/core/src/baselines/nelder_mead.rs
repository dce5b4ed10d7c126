//! Nelder-Mead simplex search (maximizing), coefficients (1, 2, 0.5, 0.5).

use crate::baselines::{BaselineConfig, BaselineResult, Objective, Recorder};
use crate::error::Result;

const ALPHA: f64 = 1.0; // reflection
const GAMMA: f64 = 2.0; // expansion
const RHO: f64 = 0.5; // contraction
const SIGMA: f64 = 0.5; // shrink

/// Runs the simplex search from `x0` until the simplex reward spread drops
/// below `spread_tolerance` or the evaluation budget runs out.
pub fn nelder_mead<O: Objective>(
    objective: &mut O,
    x0: &[f64],
    config: &BaselineConfig,
) -> Result<BaselineResult> {
    config.validate()?;
    let n = x0.len();
    assert!(n >= 1, "dimension must be >= 1");
    let mut rec = Recorder::new(objective, config.budget);

    // Initial simplex: x0 plus a per-coordinate perturbation.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let Some(f0) = rec.try_eval(x0) else {
        return Ok(rec.finish());
    };
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += config.simplex_step;
        let Some(f) = rec.try_eval(&v) else {
            return Ok(rec.finish());
        };
        simplex.push((v, f));
    }

    loop {
        // Best first (maximization).
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let spread = simplex[0].1 - simplex[n].1;
        if spread < config.spread_tolerance {
            break;
        }

        // Centroid of all points except the worst.
        let mut centroid = vec![0.0; n];
        for (v, _) in simplex.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let point = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let reflected = point(ALPHA);
        let Some(fr) = rec.try_eval(&reflected) else {
            break;
        };

        if fr > simplex[0].1 {
            // Try to expand past the reflection.
            let expanded = point(GAMMA);
            let Some(fe) = rec.try_eval(&expanded) else {
                break;
            };
            simplex[n] = if fe > fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr > simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }

        // Contract toward the centroid, outside or inside.
        let contracted = if fr > worst.1 { point(RHO) } else { point(-RHO) };
        let Some(fc) = rec.try_eval(&contracted) else {
            break;
        };
        if fc > fr.max(worst.1) {
            simplex[n] = (contracted, fc);
            continue;
        }

        // Shrink everything toward the best point.
        let best = simplex[0].0.clone();
        let mut exhausted = false;
        for entry in simplex.iter_mut().skip(1) {
            let v: Vec<f64> = best
                .iter()
                .zip(&entry.0)
                .map(|(b, x)| b + SIGMA * (x - b))
                .collect();
            let Some(f) = rec.try_eval(&v) else {
                exhausted = true;
                break;
            };
            *entry = (v, f);
        }
        if exhausted {
            break;
        }
    }
    Ok(rec.finish())
}
