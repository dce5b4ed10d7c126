//! The PG-QAOA training loop: batched sampling, reward evaluation through a
//! channel, baseline-subtracted REINFORCE gradient, Adam or SGD ascent with
//! staircase learning-rate decay, robust-reward mode and the two-phase
//! diagonal-then-correlated pretraining schedule.
//!
//! Determinism contract: all random draws for an iteration (protocol
//! samples, channel noise, robust deltas) are generated sequentially from
//! the seeded stream up front; fidelity evaluations then run in parallel.
//! Records are bit-identical regardless of thread count.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::models::ControlModel;
use crate::noise::{
    average_fidelity, draw_deltas, noise_grid, worst_case_fidelity, ChannelSpec,
    DEFAULT_GRID_POINTS,
};
use crate::policy::{
    CorrelatedGaussianPolicy, DiagonalGaussianPolicy, TransformKind, SIGMA_FLOOR,
};
use crate::qsim::Protocol;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;
pub const LR_DECAY_FACTOR: f64 = 0.96;
pub const LR_DECAY_EVERY: usize = 50;

fn default_beta1() -> f64 {
    ADAM_BETA1
}
fn default_beta2() -> f64 {
    ADAM_BETA2
}
fn default_epsilon() -> f64 {
    ADAM_EPSILON
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OptimizerSpec {
    Adam {
        lr: f64,
        #[serde(default = "default_beta1")]
        beta1: f64,
        #[serde(default = "default_beta2")]
        beta2: f64,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    Sgd {
        lr: f64,
    },
}

impl OptimizerSpec {
    pub fn lr(&self) -> f64 {
        match self {
            OptimizerSpec::Adam { lr, .. } | OptimizerSpec::Sgd { lr } => *lr,
        }
    }
}

fn default_decay_factor() -> f64 {
    LR_DECAY_FACTOR
}
fn default_decay_every() -> usize {
    LR_DECAY_EVERY
}

/// Staircase decay: lr_t = lr_0 * factor^floor(t / every).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LrDecay {
    #[serde(default = "default_decay_factor")]
    pub factor: f64,
    #[serde(default = "default_decay_every")]
    pub every: usize,
}

impl Default for LrDecay {
    fn default() -> Self {
        Self { factor: LR_DECAY_FACTOR, every: LR_DECAY_EVERY }
    }
}

impl LrDecay {
    pub fn lr_at(&self, lr0: f64, iteration: usize) -> f64 {
        lr0 * self.factor.powi((iteration / self.every) as i32)
    }
}

fn default_sigma_floor() -> f64 {
    SIGMA_FLOOR
}
fn default_grid_points() -> usize {
    DEFAULT_GRID_POINTS
}
fn default_robust_eval_every() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub iterations: usize,
    pub optimizer: OptimizerSpec,
    #[serde(default)]
    pub lr_decay: LrDecay,
    pub channel: ChannelSpec,
    #[serde(default = "default_sigma_floor")]
    pub sigma_floor: f64,
    /// Iterations at which per-batch snapshots are captured.
    #[serde(default)]
    pub snapshot_iterations: Vec<usize>,
    /// Grid-evaluation cadence for robust runs.
    #[serde(default = "default_robust_eval_every")]
    pub robust_eval_every: usize,
    /// Grid points per delta dimension for the robust diagnostics.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// Zero the off-diagonal transform gradient of a correlated policy.
    /// Equivalence-testing hook; leaves diagonal training untouched.
    #[serde(default)]
    pub mask_offdiagonal: bool,
    /// Robust oracle mode: replace the K random delta draws by the full
    /// midpoint grid (grid_points per dimension) every iteration.
    #[serde(default)]
    pub robust_exhaustive_grid: bool,
}

impl TrainConfig {
    pub fn validate(&self, model: &ControlModel) -> Result<()> {
        if self.batch_size < 1 {
            return Err(Error::InvalidConfig("batch_size must be >= 1".into()));
        }
        if self.iterations < 1 {
            return Err(Error::InvalidConfig("iterations must be >= 1".into()));
        }
        if self.optimizer.lr() <= 0.0 {
            return Err(Error::InvalidConfig("learning rate must be > 0".into()));
        }
        self.channel.validate()?;
        if self.channel.is_robust() && model.noise_dim() == 0 {
            return Err(Error::InvalidConfig(
                "robust channel requires a noisy model (noise_dim >= 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Either trainable policy, with a flattened parameter view for the
/// optimizer: diagonal [mu; sigma], correlated [mu; A row-major].
#[derive(Debug, Clone)]
pub enum PolicyState {
    Diagonal(DiagonalGaussianPolicy),
    Correlated(CorrelatedGaussianPolicy),
}

impl PolicyState {
    pub fn action_dim(&self) -> usize {
        match self {
            PolicyState::Diagonal(p) => p.dim(),
            PolicyState::Correlated(p) => p.dim(),
        }
    }

    pub fn param_len(&self) -> usize {
        let d = self.action_dim();
        match self {
            PolicyState::Diagonal(_) => 2 * d,
            PolicyState::Correlated(_) => d + d * d,
        }
    }

    pub fn mean_protocol(&self) -> Protocol {
        match self {
            PolicyState::Diagonal(p) => p.mean_protocol(),
            PolicyState::Correlated(p) => p.mean_protocol(),
        }
    }

    pub fn sample_batch<R: Rng>(&self, m: usize, rng: &mut R) -> Vec<Protocol> {
        match self {
            PolicyState::Diagonal(p) => p.sample(m, rng).into_iter().map(|(x, _)| x).collect(),
            PolicyState::Correlated(p) => {
                p.sample(m, rng).into_iter().map(|(x, _)| x).collect()
            }
        }
    }

    /// Flattened analytic score gradient of log pi at x.
    pub fn score(&self, x: &Protocol) -> Result<DVector<f64>> {
        match self {
            PolicyState::Diagonal(p) => {
                let (dmu, dsigma) = p.score_gradient(x.durations());
                let mut out = DVector::zeros(2 * p.dim());
                out.rows_mut(0, p.dim()).copy_from(&dmu);
                out.rows_mut(p.dim(), p.dim()).copy_from(&dsigma);
                Ok(out)
            }
            PolicyState::Correlated(p) => {
                let d = p.dim();
                let (dmu, da) = p.score_gradient(x.durations())?;
                let mut out = DVector::zeros(d + d * d);
                out.rows_mut(0, d).copy_from(&dmu);
                for i in 0..d {
                    for j in 0..d {
                        out[d + i * d + j] = da[(i, j)];
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn ascend(&mut self, step: &DVector<f64>) {
        match self {
            PolicyState::Diagonal(p) => {
                let d = p.dim();
                let dmu = step.rows(0, d).into_owned();
                let dsigma = step.rows(d, d).into_owned();
                p.ascend(&dmu, &dsigma);
            }
            PolicyState::Correlated(p) => {
                let d = p.dim();
                let dmu = step.rows(0, d).into_owned();
                let mut da = DMatrix::zeros(d, d);
                for i in 0..d {
                    for j in 0..d {
                        da[(i, j)] = step[d + i * d + j];
                    }
                }
                p.ascend(&dmu, &da);
            }
        }
    }

    pub fn project(&mut self, sigma_floor: f64) {
        if let PolicyState::Diagonal(p) = self {
            p.project(sigma_floor);
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            PolicyState::Diagonal(p) => {
                let mut v: Vec<f64> = p.means().iter().cloned().collect();
                v.extend(p.stds().iter().cloned());
                v
            }
            PolicyState::Correlated(p) => {
                let mut v: Vec<f64> = p.mean().iter().cloned().collect();
                let d = p.dim();
                for i in 0..d {
                    for j in 0..d {
                        v.push(p.transform()[(i, j)]);
                    }
                }
                v
            }
        }
    }

    /// FNV-1a over the raw parameter bits: the per-iteration snapshot hash.
    pub fn param_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for p in self.params() {
            for b in p.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }

    pub fn checkpoint(&self) -> PolicyCheckpoint {
        match self {
            PolicyState::Diagonal(p) => PolicyCheckpoint::Diagonal {
                means: p.means().iter().cloned().collect(),
                stds: p.stds().iter().cloned().collect(),
            },
            PolicyState::Correlated(p) => {
                let d = p.dim();
                let mut t = Vec::with_capacity(d * d);
                for i in 0..d {
                    for j in 0..d {
                        t.push(p.transform()[(i, j)]);
                    }
                }
                PolicyCheckpoint::Correlated {
                    mean: p.mean().iter().cloned().collect(),
                    transform_row_major: t,
                    transform: p.kind(),
                }
            }
        }
    }
}

/// JSON-serializable policy parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyCheckpoint {
    Diagonal {
        means: Vec<f64>,
        stds: Vec<f64>,
    },
    Correlated {
        mean: Vec<f64>,
        transform_row_major: Vec<f64>,
        transform: TransformKind,
    },
}

impl PolicyCheckpoint {
    pub fn into_policy(self) -> Result<PolicyState> {
        match self {
            PolicyCheckpoint::Diagonal { means, stds } => Ok(PolicyState::Diagonal(
                DiagonalGaussianPolicy::new(means, stds)?,
            )),
            PolicyCheckpoint::Correlated { mean, transform_row_major, transform } => {
                let d = mean.len();
                if transform_row_major.len() != d * d {
                    return Err(Error::InvalidConfig(format!(
                        "transform length {} does not match mean length {d}",
                        transform_row_major.len()
                    )));
                }
                let a = DMatrix::from_row_slice(d, d, &transform_row_major);
                Ok(PolicyState::Correlated(CorrelatedGaussianPolicy::new(
                    mean, a, transform,
                )?))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub mean_reward: f64,
    /// Noise-free mean fidelity of the batch protocols (diagnostic).
    pub exact_mean_fidelity: f64,
    /// Noise-free fidelity of the policy mean (greedy evaluation).
    pub greedy_fidelity: f64,
    pub lr: f64,
    pub neg_duration_count: usize,
    pub wall_ms: f64,
    /// 1 = pretraining / single phase, 2 = correlated continuation.
    pub phase: u8,
    pub policy_hash: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustEvalPoint {
    pub iteration: usize,
    pub average: f64,
    pub worst_case: f64,
}

/// Per-batch-member snapshot rows: (total_duration, reward, exact fidelity).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub iteration: usize,
    pub rows: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct TrainRecord {
    pub iterations: Vec<IterationLog>,
    pub snapshots: Vec<Snapshot>,
    pub robust_eval: Vec<RobustEvalPoint>,
    pub final_policy: PolicyState,
    pub negative_duration_total: usize,
    pub sigma_floor_hits: usize,
}

impl TrainRecord {
    pub fn final_log(&self) -> &IterationLog {
        self.iterations.last().expect("at least one iteration")
    }

    /// Mean of a field over the trailing `n` iterations.
    pub fn trailing_mean<F: Fn(&IterationLog) -> f64>(&self, n: usize, f: F) -> f64 {
        let k = n.min(self.iterations.len());
        let tail = &self.iterations[self.iterations.len() - k..];
        tail.iter().map(&f).sum::<f64>() / k as f64
    }
}

/// Baseline-subtracted REINFORCE gradient:
/// (1/M) sum_j score(x_j) * (F_j - mean F).
pub fn reinforce_gradient(policy: &PolicyState, batch: &[(Protocol, f64)]) -> Result<DVector<f64>> {
    assert!(!batch.is_empty(), "batch must be nonempty");
    let scores: Vec<DVector<f64>> = batch
        .iter()
        .map(|(x, _)| policy.score(x))
        .collect::<Result<_>>()?;
    let rewards: Vec<f64> = batch.iter().map(|&(_, f)| f).collect();
    Ok(combine_scores(policy.param_len(), &scores, &rewards))
}

fn combine_scores(param_len: usize, scores: &[DVector<f64>], rewards: &[f64]) -> DVector<f64> {
    let m = rewards.len() as f64;
    // Centered at the first reward so that equal rewards give an exactly
    // zero gradient and an exact constant shift of the batch rewards leaves
    // the gradient bit-identical.
    let r0 = rewards[0];
    let diffs: Vec<f64> = rewards.iter().map(|&f| f - r0).collect();
    let baseline = diffs.iter().sum::<f64>() / m;
    let mut grad = DVector::zeros(param_len);
    for (s, &d) in scores.iter().zip(diffs.iter()) {
        grad.axpy((d - baseline) / m, s, 1.0);
    }
    grad
}

enum OptState {
    Adam {
        lr0: f64,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
        m: DVector<f64>,
        v: DVector<f64>,
        t: usize,
    },
    Sgd {
        lr0: f64,
    },
}

impl OptState {
    fn new(spec: &OptimizerSpec, dim: usize) -> Self {
        match *spec {
            OptimizerSpec::Adam { lr, beta1, beta2, epsilon } => OptState::Adam {
                lr0: lr,
                beta1,
                beta2,
                epsilon,
                m: DVector::zeros(dim),
                v: DVector::zeros(dim),
                t: 0,
            },
            OptimizerSpec::Sgd { lr } => OptState::Sgd { lr0: lr },
        }
    }

    fn lr0(&self) -> f64 {
        match self {
            OptState::Adam { lr0, .. } | OptState::Sgd { lr0 } => *lr0,
        }
    }

    /// Ascent step for gradient `g` at the given decayed learning rate.
    fn step(&mut self, lr: f64, g: &DVector<f64>) -> DVector<f64> {
        match self {
            OptState::Sgd { .. } => g * lr,
            OptState::Adam { beta1, beta2, epsilon, m, v, t, .. } => {
                *t += 1;
                let (b1, b2, eps) = (*beta1, *beta2, *epsilon);
                let tt = *t as i32;
                let mut out = DVector::zeros(g.len());
                for i in 0..g.len() {
                    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                    let mhat = m[i] / (1.0 - b1.powi(tt));
                    let vhat = v[i] / (1.0 - b2.powi(tt));
                    out[i] = lr * mhat / (vhat.sqrt() + eps);
                }
                out
            }
        }
    }
}

/// Pre-drawn per-protocol channel randomness for one iteration.
enum ChannelDraws {
    None,
    Gaussian(Vec<f64>),
    Uniform(Vec<f64>),
    Deltas(Vec<Vec<Vec<f64>>>),
    /// One fixed delta set shared by the whole batch (grid oracle mode).
    SharedDeltas(Vec<Vec<f64>>),
}

fn predraw_channel(
    channel: &ChannelSpec,
    m: usize,
    noise_dim: usize,
    rng: &mut ChaCha8Rng,
) -> ChannelDraws {
    match channel {
        ChannelSpec::Exact => ChannelDraws::None,
        ChannelSpec::Gaussian { sigma } => {
            if *sigma == 0.0 {
                return ChannelDraws::Gaussian(vec![0.0; m]);
            }
            let dist = Normal::new(0.0, *sigma).expect("sigma >= 0");
            ChannelDraws::Gaussian((0..m).map(|_| dist.sample(rng)).collect())
        }
        ChannelSpec::QuantumMeasurement => {
            ChannelDraws::Uniform((0..m).map(|_| rng.random::<f64>()).collect())
        }
        ChannelSpec::Robust { num_draws, support } => ChannelDraws::Deltas(
            (0..m)
                .map(|_| draw_deltas(*num_draws, noise_dim, *support, rng))
                .collect(),
        ),
    }
}

/// One seeded PG-QAOA run (Algorithm-1 loop). `phase` tags the iteration
/// logs; `iteration_offset` continues numbering across pretraining phases.
fn train_phase(
    model: &ControlModel,
    mut policy: PolicyState,
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
    phase: u8,
    iteration_offset: usize,
    record: &mut TrainRecord,
) -> Result<PolicyState> {
    config.validate(model)?;
    let zeros = vec![0.0; model.noise_dim()];
    let noise_free = model.hamiltonians(&zeros)?;
    let mut opt = OptState::new(&config.optimizer, policy.param_len());
    let mask_upper = config.mask_offdiagonal && matches!(policy, PolicyState::Correlated(_));

    for t in 0..config.iterations {
        let started = Instant::now();
        let lr = config.lr_decay.lr_at(opt.lr0(), t);

        // Sequential draws, parallel evaluation.
        let protocols = policy.sample_batch(config.batch_size, rng);
        let draws = match (&config.channel, config.robust_exhaustive_grid) {
            (ChannelSpec::Robust { support, .. }, true) => ChannelDraws::SharedDeltas(
                noise_grid(model.noise_dim(), *support, config.grid_points),
            ),
            _ => predraw_channel(&config.channel, config.batch_size, model.noise_dim(), rng),
        };

        let evals: Vec<Result<(f64, f64)>> = protocols
            .par_iter()
            .enumerate()
            .map(|(j, x)| {
                let exact = model.protocol_fidelity_with(&noise_free, x)?;
                let reward = match &draws {
                    ChannelDraws::None => exact,
                    ChannelDraws::Gaussian(eps) => (exact + eps[j]).clamp(0.0, 1.0),
                    ChannelDraws::Uniform(u) => {
                        crate::noise::quantum_measurement_from_uniform(exact, u[j])
                    }
                    ChannelDraws::Deltas(all) => {
                        crate::noise::robust_min_over(model, x, &all[j])?
                    }
                    ChannelDraws::SharedDeltas(grid) => {
                        crate::noise::robust_min_over(model, x, grid)?
                    }
                };
                Ok((exact, reward))
            })
            .collect();
        let mut exacts = Vec::with_capacity(config.batch_size);
        let mut rewards = Vec::with_capacity(config.batch_size);
        for e in evals {
            let (exact, reward) = e?;
            exacts.push(exact);
            rewards.push(reward);
        }
        let mean_reward = rewards.iter().sum::<f64>() / rewards.len() as f64;
        if mean_reward.is_nan() {
            return Err(Error::Divergence { iteration: iteration_offset + t });
        }
        let exact_mean = exacts.iter().sum::<f64>() / exacts.len() as f64;

        let scores: Vec<Result<DVector<f64>>> =
            protocols.par_iter().map(|x| policy.score(x)).collect();
        let scores: Vec<DVector<f64>> = scores.into_iter().collect::<Result<_>>()?;
        let mut grad = combine_scores(policy.param_len(), &scores, &rewards);
        if mask_upper {
            let d = policy.action_dim();
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        grad[d + i * d + j] = 0.0;
                    }
                }
            }
        }

        let step = opt.step(lr, &grad);
        policy.ascend(&step);
        if let PolicyState::Diagonal(p) = &policy {
            record.sigma_floor_hits +=
                p.stds().iter().filter(|&&s| s < config.sigma_floor).count();
        }
        policy.project(config.sigma_floor);

        let neg = protocols.iter().map(|p| p.negative_count()).sum::<usize>();
        record.negative_duration_total += neg;
        let greedy = model.protocol_fidelity_with(&noise_free, &policy.mean_protocol())?;

        let iteration = iteration_offset + t;
        if config.snapshot_iterations.contains(&t) {
            record.snapshots.push(Snapshot {
                iteration,
                rows: protocols
                    .iter()
                    .zip(rewards.iter().zip(exacts.iter()))
                    .map(|(p, (&r, &e))| (p.total_duration(), r, e))
                    .collect(),
            });
        }
        if let ChannelSpec::Robust { support, .. } = &config.channel {
            if t % config.robust_eval_every == 0 || t + 1 == config.iterations {
                let mean_proto = policy.mean_protocol();
                record.robust_eval.push(RobustEvalPoint {
                    iteration,
                    average: average_fidelity(model, &mean_proto, *support, config.grid_points)?,
                    worst_case: worst_case_fidelity(
                        model,
                        &mean_proto,
                        *support,
                        config.grid_points,
                    )?,
                });
            }
        }

        record.iterations.push(IterationLog {
            iteration,
            mean_reward,
            exact_mean_fidelity: exact_mean,
            greedy_fidelity: greedy,
            lr,
            neg_duration_count: neg,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
            phase,
            policy_hash: policy.param_hash(),
        });
    }
    Ok(policy)
}

pub fn train(
    model: &ControlModel,
    policy: PolicyState,
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<TrainRecord> {
    let mut record = TrainRecord {
        iterations: Vec::with_capacity(config.iterations),
        snapshots: Vec::new(),
        robust_eval: Vec::new(),
        final_policy: policy.clone(),
        negative_duration_total: 0,
        sigma_floor_hits: 0,
    };
    record.final_policy = train_phase(model, policy, config, rng, 1, 0, &mut record)?;
    Ok(record)
}

/// Robust (max-min) training: identical loop, rewards are the min exact
/// fidelity over K fresh uniform delta draws per protocol.
pub fn train_robust(
    model: &ControlModel,
    policy: PolicyState,
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<TrainRecord> {
    if !config.channel.is_robust() {
        return Err(Error::InvalidConfig(
            "train_robust requires a robust reward channel".into(),
        ));
    }
    train(model, policy, config, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PretrainConfig {
    /// Phase 1: diagonal policy.
    pub phase1: TrainConfig,
    /// Phase 2: correlated policy seeded with diag(sigma), typically SGD.
    pub phase2: TrainConfig,
    pub transform: TransformKind,
}

/// Phase-1 diagonal training followed by a correlated continuation whose
/// initial covariance equals diag(sigma^2) from phase 1 exactly.
pub fn pretrain_then_correlate(
    model: &ControlModel,
    initial: DiagonalGaussianPolicy,
    config: &PretrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<TrainRecord> {
    let mut record = TrainRecord {
        iterations: Vec::with_capacity(config.phase1.iterations + config.phase2.iterations),
        snapshots: Vec::new(),
        robust_eval: Vec::new(),
        final_policy: PolicyState::Diagonal(initial.clone()),
        negative_duration_total: 0,
        sigma_floor_hits: 0,
    };
    let diag = train_phase(
        model,
        PolicyState::Diagonal(initial),
        &config.phase1,
        rng,
        1,
        0,
        &mut record,
    )?;
    let PolicyState::Diagonal(diag) = diag else {
        unreachable!("phase 1 trains a diagonal policy")
    };
    let correlated = CorrelatedGaussianPolicy::from_diagonal(&diag, config.transform);
    record.final_policy = train_phase(
        model,
        PolicyState::Correlated(correlated),
        &config.phase2,
        rng,
        2,
        config.phase1.iterations,
        &mut record,
    )?;
    Ok(record)
}

/// Standard-normal batch used by tests that need raw latents.
#[cfg(test)]
pub(crate) fn standard_normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rand_distr::StandardNormal.sample(rng))
        .collect()
}
