//! Powell's direction-set method with golden-section line searches.

use crate::baselines::{BaselineConfig, BaselineResult, Objective, Recorder};
use crate::error::Result;

const INV_PHI: f64 = 0.618_033_988_749_894_9;
/// Line-search bracket in the step parameter, wide enough to cross the
/// whole [0, 4] duration box from any interior point.
const BRACKET: f64 = 4.0;

/// Golden-section maximization of f(x0 + t d) for t in [-BRACKET, BRACKET].
/// Returns (t*, f(t*)), or None when the budget runs out mid-search.
fn golden_section<O: Objective>(
    rec: &mut Recorder<O>,
    x0: &[f64],
    direction: &[f64],
    tolerance: f64,
) -> Option<(f64, f64)> {
    let at = |t: f64| -> Vec<f64> {
        x0.iter()
            .zip(direction)
            .map(|(x, d)| x + t * d)
            .collect()
    };
    let (mut a, mut b) = (-BRACKET, BRACKET);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = rec.try_eval(&at(c))?;
    let mut fd = rec.try_eval(&at(d))?;
    while b - a > tolerance {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = rec.try_eval(&at(c))?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = rec.try_eval(&at(d))?;
        }
    }
    Some(if fc > fd { (c, fc) } else { (d, fd) })
}

/// Powell's method (maximizing). Directions are replaced by the sweep
/// displacement per the classic update and reset to the coordinate basis
/// every `dim` outer iterations.
pub fn powell<O: Objective>(
    objective: &mut O,
    x0: &[f64],
    config: &BaselineConfig,
) -> Result<BaselineResult> {
    config.validate()?;
    let n = x0.len();
    assert!(n >= 1, "dimension must be >= 1");
    let mut rec = Recorder::new(objective, config.budget);

    let basis = |i: usize| -> Vec<f64> {
        let mut d = vec![0.0; n];
        d[i] = 1.0;
        d
    };
    let mut directions: Vec<Vec<f64>> = (0..n).map(basis).collect();
    let mut x = x0.to_vec();
    let Some(mut fx) = rec.try_eval(&x) else {
        return Ok(rec.finish());
    };

    let mut outer = 0;
    'outer: loop {
        if outer > 0 && outer % n == 0 {
            directions = (0..n).map(basis).collect();
        }
        outer += 1;

        let sweep_start = x.clone();
        let sweep_f = fx;
        let mut biggest_gain = 0.0;
        let mut biggest_index = 0;
        for (i, dir) in directions.iter().enumerate() {
            let Some((t, ft)) = golden_section(&mut rec, &x, dir, config.line_tolerance) else {
                break 'outer;
            };
            if ft > fx {
                if ft - fx > biggest_gain {
                    biggest_gain = ft - fx;
                    biggest_index = i;
                }
                for (xi, di) in x.iter_mut().zip(dir) {
                    *xi += t * di;
                }
                fx = ft;
            }
        }

        let improvement = fx - sweep_f;
        if improvement < config.spread_tolerance {
            break;
        }

        // Replace the direction of largest gain with the sweep displacement
        // and line-search along it.
        let displacement: Vec<f64> = x
            .iter()
            .zip(&sweep_start)
            .map(|(a, b)| a - b)
            .collect();
        if displacement.iter().map(|d| d * d).sum::<f64>() > 0.0 {
            directions[biggest_index] = displacement.clone();
            let Some((t, ft)) = golden_section(&mut rec, &x, &displacement, config.line_tolerance)
            else {
                break;
            };
            if ft > fx {
                for (xi, di) in x.iter_mut().zip(&displacement) {
                    *xi += t * di;
                }
                fx = ft;
            }
        }
    }
    Ok(rec.finish())
}
