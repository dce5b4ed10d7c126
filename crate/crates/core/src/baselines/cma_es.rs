//! (mu/mu_w, lambda)-CMA-ES with rank-1 and rank-mu covariance updates and
//! cumulative step-size adaptation.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::baselines::{BaselineConfig, BaselineResult, Objective, Recorder};
use crate::error::Result;

/// Default population 4 + floor(3 ln dim).
pub fn default_population(dim: usize) -> usize {
    4 + (3.0 * (dim as f64).ln()).floor() as usize
}

const COND_LIMIT: f64 = 1e14;
const SIGMA_MIN: f64 = 1e-12;
const SIGMA_MAX: f64 = 1e6;

struct Strategy {
    lambda: usize,
    mu: usize,
    weights: Vec<f64>,
    mu_eff: f64,
    c_sigma: f64,
    d_sigma: f64,
    c_c: f64,
    c_1: f64,
    c_mu: f64,
    chi_n: f64,
}

impl Strategy {
    fn new(n: usize, lambda: usize) -> Self {
        let nf = n as f64;
        let mu = lambda / 2;
        let mut weights: Vec<f64> = (0..mu)
            .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - ((i + 1) as f64).ln())
            .collect();
        let sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= sum;
        }
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let c_sigma = (mu_eff + 2.0) / (nf + mu_eff + 5.0);
        let d_sigma =
            1.0 + 2.0 * (((mu_eff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / nf) / (nf + 4.0 + 2.0 * mu_eff / nf);
        let c_1 = 2.0 / ((nf + 1.3) * (nf + 1.3) + mu_eff);
        let c_mu = (1.0 - c_1)
            .min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((nf + 2.0) * (nf + 2.0) + mu_eff));
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));
        Self {
            lambda,
            mu,
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c_1,
            c_mu,
            chi_n,
        }
    }
}

/// CMA-ES (maximizing). Deterministic under a fixed `config.seed`; restarts
/// from the current mean with a reset covariance on degeneracy.
pub fn cma_es<O: Objective>(
    objective: &mut O,
    x0: &[f64],
    config: &BaselineConfig,
) -> Result<BaselineResult> {
    config.validate()?;
    let n = x0.len();
    assert!(n >= 1, "dimension must be >= 1");
    let lambda = config.cma_population.unwrap_or_else(|| default_population(n));
    let st = Strategy::new(n, lambda.max(2));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rec = Recorder::new(objective, config.budget);

    let mut mean = DVector::from_column_slice(x0);
    let mut sigma = config.cma_sigma0;
    let mut cov = DMatrix::<f64>::identity(n, n);
    let mut p_sigma = DVector::<f64>::zeros(n);
    let mut p_c = DVector::<f64>::zeros(n);
    let mut generation: usize = 0;

    while !rec.exhausted() {
        // Eigendecompose C; restart on degeneracy.
        let eig = nalgebra::SymmetricEigen::new(cov.clone());
        let min_ev = eig.eigenvalues.min();
        let max_ev = eig.eigenvalues.max();
        let degenerate = !min_ev.is_finite()
            || min_ev <= 0.0
            || max_ev / min_ev > COND_LIMIT
            || sigma < SIGMA_MIN
            || sigma > SIGMA_MAX;
        let eig = if degenerate {
            rec.note_restart();
            cov = DMatrix::identity(n, n);
            p_sigma = DVector::zeros(n);
            p_c = DVector::zeros(n);
            sigma = config.cma_sigma0;
            generation = 0;
            nalgebra::SymmetricEigen::new(cov.clone())
        } else {
            eig
        };
        let b = &eig.eigenvectors;
        let d_sqrt: DVector<f64> = eig.eigenvalues.map(|v| v.sqrt());

        // Sample and evaluate the population.
        let mut scored: Vec<(DVector<f64>, DVector<f64>, f64)> = Vec::with_capacity(st.lambda);
        for _ in 0..st.lambda {
            let z = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
            let y = b * z.component_mul(&d_sqrt);
            let x = &mean + sigma * &y;
            let Some(reward) = rec.try_eval(x.as_slice()) else {
                break;
            };
            scored.push((x, y, reward));
        }
        if scored.len() < st.mu {
            break;
        }
        scored.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap());

        // Weighted recombination of the top mu.
        let mut y_w = DVector::<f64>::zeros(n);
        for (i, w) in st.weights.iter().enumerate() {
            y_w += *w * &scored[i].1;
        }
        mean += sigma * &y_w;

        // Step-size path and update.
        let c_inv_sqrt_yw = b * (b.transpose() * &y_w).component_div(&d_sqrt);
        p_sigma = (1.0 - st.c_sigma) * &p_sigma
            + (st.c_sigma * (2.0 - st.c_sigma) * st.mu_eff).sqrt() * c_inv_sqrt_yw;
        generation += 1;
        let expected_decay =
            (1.0 - (1.0 - st.c_sigma).powi(2 * generation as i32)).sqrt();
        let h_sigma = if p_sigma.norm() / expected_decay
            < (1.4 + 2.0 / (n as f64 + 1.0)) * st.chi_n
        {
            1.0
        } else {
            0.0
        };
        sigma *= ((st.c_sigma / st.d_sigma) * (p_sigma.norm() / st.chi_n - 1.0)).exp();

        // Covariance path, rank-1 and rank-mu updates.
        p_c = (1.0 - st.c_c) * &p_c
            + h_sigma * (st.c_c * (2.0 - st.c_c) * st.mu_eff).sqrt() * &y_w;
        let delta_h = (1.0 - h_sigma) * st.c_c * (2.0 - st.c_c);
        let mut rank_mu = DMatrix::<f64>::zeros(n, n);
        for (i, w) in st.weights.iter().enumerate() {
            rank_mu += *w * (&scored[i].1 * scored[i].1.transpose());
        }
        cov = (1.0 - st.c_1 - st.c_mu) * &cov
            + st.c_1 * (&p_c * p_c.transpose() + delta_h * &cov)
            + st.c_mu * rank_mu;
        // Symmetrize against floating-point drift.
        cov = (&cov + cov.transpose()) * 0.5;
    }
    Ok(rec.finish())
}
