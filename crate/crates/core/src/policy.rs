//! Trainable distributions over protocols: a diagonal Gaussian policy and a
//! correlated multivariate Gaussian policy with full matrix A or
//! lower-triangular matrix L, with sampling, log-likelihood and analytic
//! score gradients.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::Protocol;

/// Lower bound on every policy std, enforced by projection after updates.
pub const SIGMA_FLOOR: f64 = 1e-6;

/// Minimum geometric-mean scale |det A|^(1/d) of the transform. A plain
/// determinant floor would reject healthy high-dimensional transforms whose
/// per-axis scales are small (det underflows exponentially in d).
const SCALE_FLOOR: f64 = 1e-9;

/// Initializer draws are rejected outside +- this many standard deviations.
pub const TRUNCATION_SIGMAS: f64 = 2.0;

const LN_2PI: f64 = 1.8378770664093453; // ln(2 pi)

/// Rejection-sampled normal truncated at +-2 standard deviations.
pub fn sample_truncated_normal<R: Rng>(mean: f64, std: f64, rng: &mut R) -> f64 {
    loop {
        let z: f64 = StandardNormal.sample(rng);
        if z.abs() <= TRUNCATION_SIGMAS {
            return mean + std * z;
        }
    }
}

/// exp of a truncated normal: the initializer the experiments use for stds.
pub fn sample_truncated_lognormal<R: Rng>(mu: f64, sigma: f64, rng: &mut R) -> f64 {
    sample_truncated_normal(mu, sigma, rng).exp()
}

/// Initializer for the policy means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeanInit {
    Constant { value: f64 },
    TruncatedNormal { mean: f64, std: f64 },
}

impl MeanInit {
    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            MeanInit::Constant { value } => *value,
            MeanInit::TruncatedNormal { mean, std } => sample_truncated_normal(*mean, *std, rng),
        }
    }
}

/// Initializer for the policy stds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StdInit {
    Constant { value: f64 },
    TruncatedLogNormal { mu: f64, sigma: f64 },
}

impl StdInit {
    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            StdInit::Constant { value } => *value,
            StdInit::TruncatedLogNormal { mu, sigma } => {
                sample_truncated_lognormal(*mu, *sigma, rng)
            }
        }
    }
}

/// Product of independent Gaussians: 2p means and 2p stds.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalGaussianPolicy {
    means: DVector<f64>,
    stds: DVector<f64>,
}

impl DiagonalGaussianPolicy {
    pub fn new(means: Vec<f64>, stds: Vec<f64>) -> Result<Self> {
        if means.len() != stds.len() || means.len() % 2 != 0 || means.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "policy needs matching even-length means/stds, got {} and {}",
                means.len(),
                stds.len()
            )));
        }
        let mut policy = Self {
            means: DVector::from_vec(means),
            stds: DVector::from_vec(stds),
        };
        policy.project(SIGMA_FLOOR);
        Ok(policy)
    }

    pub fn init<R: Rng>(
        dim: usize,
        mean_init: &MeanInit,
        std_init: &StdInit,
        rng: &mut R,
    ) -> Result<Self> {
        let means = (0..dim).map(|_| mean_init.draw(rng)).collect();
        let stds = (0..dim).map(|_| std_init.draw(rng)).collect();
        Self::new(means, stds)
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &DVector<f64> {
        &self.means
    }

    pub fn stds(&self) -> &DVector<f64> {
        &self.stds
    }

    pub fn mean_protocol(&self) -> Protocol {
        Protocol::new(self.means.iter().cloned().collect()).expect("even length")
    }

    pub fn sample_one<R: Rng>(&self, rng: &mut R) -> (Protocol, DVector<f64>) {
        let z = DVector::from_fn(self.dim(), |_, _| StandardNormal.sample(rng));
        let x: Vec<f64> = (0..self.dim())
            .map(|i| self.means[i] + self.stds[i] * z[i])
            .collect();
        (Protocol::new(x).expect("even length"), z)
    }

    pub fn sample<R: Rng>(&self, m: usize, rng: &mut R) -> Vec<(Protocol, DVector<f64>)> {
        (0..m).map(|_| self.sample_one(rng)).collect()
    }

    /// Full log density including the normalizer.
    pub fn log_prob(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim());
        let mut lp = 0.0;
        for i in 0..self.dim() {
            let u = (x[i] - self.means[i]) / self.stds[i];
            lp -= 0.5 * (LN_2PI + u * u) + self.stds[i].ln();
        }
        lp
    }

    /// (d log pi / d mu, d log pi / d sigma).
    pub fn score_gradient(&self, x: &[f64]) -> (DVector<f64>, DVector<f64>) {
        assert_eq!(x.len(), self.dim());
        let mut dmu = DVector::zeros(self.dim());
        let mut dsigma = DVector::zeros(self.dim());
        for i in 0..self.dim() {
            let u = x[i] - self.means[i];
            let s = self.stds[i];
            dmu[i] = u / (s * s);
            dsigma[i] = (u * u - s * s) / (s * s * s);
        }
        (dmu, dsigma)
    }

    pub fn project(&mut self, sigma_floor: f64) {
        for s in self.stds.iter_mut() {
            if *s < sigma_floor {
                *s = sigma_floor;
            }
        }
    }

    pub fn ascend(&mut self, dmu: &DVector<f64>, dsigma: &DVector<f64>) {
        self.means += dmu;
        self.stds += dsigma;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    /// Arbitrary invertible matrix A, Sigma = A A^T.
    Full,
    /// Lower-triangular L, Sigma = L L^T; upper triangle pinned to zero.
    Lower,
}

/// Correlated Gaussian policy x = A z + mu with z ~ N(0, I).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedGaussianPolicy {
    mean: DVector<f64>,
    transform: DMatrix<f64>,
    kind: TransformKind,
}

impl CorrelatedGaussianPolicy {
    pub fn new(mean: Vec<f64>, transform: DMatrix<f64>, kind: TransformKind) -> Result<Self> {
        let d = mean.len();
        if d == 0 || d % 2 != 0 || transform.nrows() != d || transform.ncols() != d {
            return Err(Error::InvalidConfig(format!(
                "correlated policy needs a 2p mean and a matching square transform, got {} and {}x{}",
                d,
                transform.nrows(),
                transform.ncols()
            )));
        }
        let mut policy = Self {
            mean: DVector::from_vec(mean),
            transform,
            kind,
        };
        policy.enforce_structure();
        policy.check_invertible()?;
        Ok(policy)
    }

    /// Sigma = diag(sigma^2) exactly: phase-2 seeding from a pretrained
    /// diagonal policy.
    pub fn from_diagonal(diag: &DiagonalGaussianPolicy, kind: TransformKind) -> Self {
        let d = diag.dim();
        let mut a = DMatrix::zeros(d, d);
        for i in 0..d {
            a[(i, i)] = diag.stds()[i];
        }
        Self {
            mean: diag.means().clone(),
            transform: a,
            kind,
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn transform(&self) -> &DMatrix<f64> {
        &self.transform
    }

    pub fn mean_protocol(&self) -> Protocol {
        Protocol::new(self.mean.iter().cloned().collect()).expect("even length")
    }

    pub fn transform_det(&self) -> f64 {
        self.transform.clone().lu().determinant()
    }

    /// |det A|^(1/d), computed in log space so it survives dimensions where
    /// the determinant itself under- or overflows.
    pub fn transform_scale(&self) -> f64 {
        let lu = self.transform.clone().lu();
        let u = lu.u();
        let d = self.dim();
        let log_sum: f64 = (0..d).map(|i| u[(i, i)].abs().ln()).sum();
        (log_sum / d as f64).exp()
    }

    /// ln |det A| via the LU diagonal, immune to det underflow.
    fn log_abs_det(&self) -> f64 {
        self.dim() as f64 * self.transform_scale().ln()
    }

    fn check_invertible(&self) -> Result<()> {
        let scale = self.transform_scale();
        if !scale.is_finite() || scale < SCALE_FLOOR {
            return Err(Error::SingularTransform(scale));
        }
        Ok(())
    }

    fn enforce_structure(&mut self) {
        if self.kind == TransformKind::Lower {
            let d = self.dim();
            for i in 0..d {
                for j in (i + 1)..d {
                    self.transform[(i, j)] = 0.0;
                }
            }
        }
    }

    pub fn sample_one<R: Rng>(&self, rng: &mut R) -> (Protocol, DVector<f64>) {
        let z = DVector::from_fn(self.dim(), |_, _| StandardNormal.sample(rng));
        let x = &self.transform * &z + &self.mean;
        (
            Protocol::new(x.iter().cloned().collect()).expect("even length"),
            z,
        )
    }

    pub fn sample<R: Rng>(&self, m: usize, rng: &mut R) -> Vec<(Protocol, DVector<f64>)> {
        (0..m).map(|_| self.sample_one(rng)).collect()
    }

    /// Direct Sigma-form log density with the full normalizer.
    pub fn log_prob(&self, x: &[f64]) -> Result<f64> {
        self.check_invertible()?;
        let d = self.dim();
        assert_eq!(x.len(), d);
        let u = DVector::from_row_slice(x) - &self.mean;
        let lu = self.transform.clone().lu();
        let y = lu
            .solve(&u)
            .ok_or_else(|| Error::SingularTransform(self.transform_scale()))?;
        // u^T Sigma^-1 u = |A^-1 u|^2
        let quad = y.norm_squared();
        let p = d as f64 / 2.0;
        Ok(-p * LN_2PI - self.log_abs_det() - 0.5 * quad)
    }

    /// Change-of-variable form: log pi(z) - log|det A|.
    pub fn log_prob_from_latent(&self, z: &DVector<f64>) -> Result<f64> {
        self.check_invertible()?;
        let p = self.dim() as f64 / 2.0;
        Ok(-p * LN_2PI - 0.5 * z.norm_squared() - self.log_abs_det())
    }

    /// (d log pi / d mu, d log pi / d A), with the Tril mask applied for the
    /// lower-triangular variant:
    ///   d/d mu = Sigma^-1 u
    ///   d/d A  = (-Sigma^-1 + Sigma^-1 u u^T Sigma^-1) A
    pub fn score_gradient(&self, x: &[f64]) -> Result<(DVector<f64>, DMatrix<f64>)> {
        self.check_invertible()?;
        let d = self.dim();
        assert_eq!(x.len(), d);
        let a_inv = self
            .transform
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::SingularTransform(self.transform_scale()))?;
        let sigma_inv = a_inv.transpose() * &a_inv;
        let u = DVector::from_row_slice(x) - &self.mean;
        let w = &sigma_inv * &u; // Sigma^-1 u
        let dmu = w.clone();
        let mut da = (&w * w.transpose() - &sigma_inv) * &self.transform;
        if self.kind == TransformKind::Lower {
            for i in 0..d {
                for j in (i + 1)..d {
                    da[(i, j)] = 0.0;
                }
            }
        }
        Ok((dmu, da))
    }

    pub fn ascend(&mut self, dmu: &DVector<f64>, da: &DMatrix<f64>) {
        self.mean += dmu;
        self.transform += da;
        self.enforce_structure();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_correlated(
        rng: &mut ChaCha8Rng,
        dim: usize,
        kind: TransformKind,
    ) -> CorrelatedGaussianPolicy {
        let mean: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
        let mut a = DMatrix::from_fn(dim, dim, |_, _| 0.4 * (rng.random::<f64>() - 0.5));
        for i in 0..dim {
            a[(i, i)] += 1.0; // keep well-conditioned
        }
        CorrelatedGaussianPolicy::new(mean, a, kind).unwrap()
    }

    #[test]
    fn diagonal_peak_log_prob() {
        let p = DiagonalGaussianPolicy::new(vec![0.3, -0.2], vec![1.0, 1.0]).unwrap();
        let lp = p.log_prob(&[0.3, -0.2]);
        assert_abs_diff_eq!(lp, -LN_2PI, epsilon = 1e-12); // -log(2 pi) for 2p=2, sigma=1
    }

    #[test]
    fn diagonal_normalizer_scaling() {
        let mu = vec![0.1, 0.2, 0.3, 0.4];
        let s = vec![0.5, 0.7, 1.1, 0.9];
        let c = 3.0;
        let p0 = DiagonalGaussianPolicy::new(mu.clone(), s.clone()).unwrap();
        let p1 = DiagonalGaussianPolicy::new(
            mu.clone(),
            s.iter().map(|x| c * x).collect(),
        )
        .unwrap();
        let shift = p1.log_prob(&mu) - p0.log_prob(&mu);
        assert_abs_diff_eq!(shift, -(mu.len() as f64) * c.ln(), epsilon = 1e-12);
    }

    #[test]
    fn diagonal_score_at_mean() {
        let p = DiagonalGaussianPolicy::new(vec![0.3, -0.2], vec![0.5, 2.0]).unwrap();
        let (dmu, dsigma) = p.score_gradient(&[0.3, -0.2]);
        assert_abs_diff_eq!(dmu[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(dmu[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(dsigma[0], -1.0 / 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(dsigma[1], -1.0 / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn diagonal_score_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let dim = 4;
            let mu: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            let s: Vec<f64> = (0..dim).map(|_| 0.2 + rng.random::<f64>()).collect();
            let x: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 0.5).collect();
            let p = DiagonalGaussianPolicy::new(mu.clone(), s.clone()).unwrap();
            let (dmu, dsigma) = p.score_gradient(&x);
            let h = 1e-6;
            for i in 0..dim {
                let mut mu_p = mu.clone();
                let mut mu_m = mu.clone();
                mu_p[i] += h;
                mu_m[i] -= h;
                let fd = (DiagonalGaussianPolicy::new(mu_p, s.clone()).unwrap().log_prob(&x)
                    - DiagonalGaussianPolicy::new(mu_m, s.clone()).unwrap().log_prob(&x))
                    / (2.0 * h);
                let denom = dmu[i].abs().max(1.0);
                assert!((fd - dmu[i]).abs() / denom <= 1e-6);

                let mut s_p = s.clone();
                let mut s_m = s.clone();
                s_p[i] += h;
                s_m[i] -= h;
                let fd = (DiagonalGaussianPolicy::new(mu.clone(), s_p).unwrap().log_prob(&x)
                    - DiagonalGaussianPolicy::new(mu.clone(), s_m).unwrap().log_prob(&x))
                    / (2.0 * h);
                let denom = dsigma[i].abs().max(1.0);
                assert!((fd - dsigma[i]).abs() / denom <= 1e-6);
            }
        }
    }

    #[test]
    fn sample_determinism_and_floor() {
        let p = DiagonalGaussianPolicy::new(vec![0.5; 4], vec![SIGMA_FLOOR / 10.0; 4]).unwrap();
        // Constructor projects to the floor.
        assert!(p.stds().iter().all(|&s| s == SIGMA_FLOOR));
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        let a = p.sample(5, &mut r1);
        let b = p.sample(5, &mut r2);
        for ((pa, _), (pb, _)) in a.iter().zip(b.iter()) {
            assert_eq!(pa.durations(), pb.durations());
        }
        // Degenerate-width limit: samples hug the mean.
        let bound = 5.0 * SIGMA_FLOOR * (4f64).sqrt();
        for (proto, _) in &a {
            for (d, m) in proto.durations().iter().zip([0.5; 4].iter()) {
                assert!((d - m).abs() <= bound);
            }
        }
    }

    #[test]
    fn correlated_identity_sample_covariance() {
        let dim = 4;
        let p = CorrelatedGaussianPolicy::new(
            vec![0.0; dim],
            DMatrix::identity(dim, dim),
            TransformKind::Full,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let samples = p.sample(n, &mut rng);
        let mut cov = DMatrix::<f64>::zeros(dim, dim);
        for (proto, _) in &samples {
            let x = DVector::from_row_slice(proto.durations());
            cov += &x * x.transpose();
        }
        cov /= n as f64;
        for i in 0..dim {
            for j in 0..dim {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (cov[(i, j)] - expected).abs() <= 0.02,
                    "cov[{i}{j}] = {}",
                    cov[(i, j)]
                );
            }
        }
    }

    #[test]
    fn change_of_variable_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for kind in [TransformKind::Full, TransformKind::Lower] {
            let p = random_correlated(&mut rng, 6, kind);
            for _ in 0..20 {
                let (proto, z) = p.sample_one(&mut rng);
                let direct = p.log_prob(proto.durations()).unwrap();
                let latent = p.log_prob_from_latent(&z).unwrap();
                assert!((direct - latent).abs() <= 1e-9, "{direct} vs {latent}");
            }
        }
    }

    #[test]
    fn correlated_density_integrates_to_one() {
        // 2-D quadrature oracle at 2p = 2.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_correlated(&mut rng, 2, TransformKind::Full);
        let n = 400;
        let lo = -8.0;
        let hi = 8.0;
        let h = (hi - lo) / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = [
                    p.mean()[0] + lo + (i as f64 + 0.5) * h,
                    p.mean()[1] + lo + (j as f64 + 0.5) * h,
                ];
                total += p.log_prob(&x).unwrap().exp() * h * h;
            }
        }
        assert!((total - 1.0).abs() <= 1e-3, "integral {total}");
    }

    #[test]
    fn correlated_score_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for kind in [TransformKind::Full, TransformKind::Lower] {
            let p = random_correlated(&mut rng, 4, kind);
            let x: Vec<f64> = (0..4).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let (dmu, da) = p.score_gradient(&x).unwrap();
            let h = 1e-6;
            for i in 0..4 {
                let mut mu_p: Vec<f64> = p.mean().iter().cloned().collect();
                let mut mu_m = mu_p.clone();
                mu_p[i] += h;
                mu_m[i] -= h;
                let lp = CorrelatedGaussianPolicy::new(mu_p, p.transform().clone(), kind)
                    .unwrap()
                    .log_prob(&x)
                    .unwrap();
                let lm = CorrelatedGaussianPolicy::new(mu_m, p.transform().clone(), kind)
                    .unwrap()
                    .log_prob(&x)
                    .unwrap();
                let fd = (lp - lm) / (2.0 * h);
                assert!((fd - dmu[i]).abs() / dmu[i].abs().max(1.0) <= 1e-5);
            }
            for i in 0..4 {
                for j in 0..4 {
                    if kind == TransformKind::Lower && j > i {
                        assert_eq!(da[(i, j)], 0.0);
                        continue;
                    }
                    let mut a_p = p.transform().clone();
                    let mut a_m = p.transform().clone();
                    a_p[(i, j)] += h;
                    a_m[(i, j)] -= h;
                    let mean: Vec<f64> = p.mean().iter().cloned().collect();
                    let lp = CorrelatedGaussianPolicy::new(mean.clone(), a_p, kind)
                        .unwrap()
                        .log_prob(&x)
                        .unwrap();
                    let lm = CorrelatedGaussianPolicy::new(mean, a_m, kind)
                        .unwrap()
                        .log_prob(&x)
                        .unwrap();
                    let fd = (lp - lm) / (2.0 * h);
                    assert!(
                        (fd - da[(i, j)]).abs() / da[(i, j)].abs().max(1.0) <= 1e-5,
                        "entry ({i},{j}): fd {fd} vs analytic {}",
                        da[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn diagonal_reduction_of_correlated_gradient() {
        let diag =
            DiagonalGaussianPolicy::new(vec![0.4, 0.6, 0.2, 0.9], vec![0.3, 0.8, 1.2, 0.5])
                .unwrap();
        let cor = CorrelatedGaussianPolicy::from_diagonal(&diag, TransformKind::Lower);
        let x = [0.7, 0.1, -0.3, 1.4];
        let (dmu_d, dsigma_d) = diag.score_gradient(&x);
        let (dmu_c, da) = cor.score_gradient(&x).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(dmu_c[i], dmu_d[i], epsilon = 1e-12);
            assert_abs_diff_eq!(da[(i, i)], dsigma_d[i], epsilon = 1e-10);
        }
        let lp_d = diag.log_prob(&x);
        let lp_c = cor.log_prob(&x).unwrap();
        assert_abs_diff_eq!(lp_d, lp_c, epsilon = 1e-10);
    }

    #[test]
    fn score_at_mean_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = random_correlated(&mut rng, 4, TransformKind::Full);
        let mean: Vec<f64> = p.mean().iter().cloned().collect();
        let (dmu, _) = p.score_gradient(&mean).unwrap();
        for v in dmu.iter() {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn score_expectation_is_zero() {
        // Mean of the score over policy samples within 4 MC standard errors.
        let p = DiagonalGaussianPolicy::new(vec![0.5, 1.0], vec![0.3, 0.6]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 100_000;
        let dim = 4; // dmu and dsigma stacked
        let mut sum = vec![0.0; dim];
        let mut sumsq = vec![0.0; dim];
        for _ in 0..n {
            let (proto, _) = p.sample_one(&mut rng);
            let (dmu, dsigma) = p.score_gradient(proto.durations());
            for i in 0..2 {
                sum[i] += dmu[i];
                sumsq[i] += dmu[i] * dmu[i];
                sum[2 + i] += dsigma[i];
                sumsq[2 + i] += dsigma[i] * dsigma[i];
            }
        }
        for i in 0..dim {
            let mean = sum[i] / n as f64;
            let var = sumsq[i] / n as f64 - mean * mean;
            let se = (var / n as f64).sqrt();
            assert!(mean.abs() <= 4.0 * se, "component {i}: {mean} vs se {se}");
        }
    }

    #[test]
    fn lower_triangular_causality() {
        // Perturbing latent z_j only changes actions x_i with i >= j.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let p = random_correlated(&mut rng, 6, TransformKind::Lower);
        let z = DVector::from_fn(6, |_, _| StandardNormal.sample(&mut rng));
        let x0 = p.transform() * &z + p.mean();
        for j in 0..6 {
            let mut z2 = z.clone();
            z2[j] += 1.0;
            let x1 = p.transform() * &z2 + p.mean();
            for i in 0..j {
                assert_eq!(x0[i], x1[i], "x_{i} changed when z_{j} moved");
            }
        }
    }

    #[test]
    fn singular_transform_rejected() {
        let a = DMatrix::zeros(2, 2);
        assert!(matches!(
            CorrelatedGaussianPolicy::new(vec![0.0, 0.0], a, TransformKind::Full),
            Err(Error::SingularTransform(_))
        ));
    }
}
