//! Derivative-free baseline optimizers (Nelder-Mead, Powell, CMA-ES, PSO)
//! on the mean-batch-fidelity objective, plus the equal-budget comparison
//! suite. All four optimizers maximize the reward.

pub mod cma_es;
pub mod nelder_mead;
pub mod powell;
pub mod pso;

pub use cma_es::{cma_es, default_population};
pub use nelder_mead::nelder_mead;
pub use powell::powell;
pub use pso::pso;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ControlModel;
use crate::noise::{gaussian_reward, quantum_measurement_reward, robust_min_reward, ChannelSpec};
use crate::pgtrain::{
    train, LrDecay, OptimizerSpec, PolicyState, TrainConfig, ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON,
};
use crate::policy::{DiagonalGaussianPolicy, MeanInit, StdInit, SIGMA_FLOOR};
use crate::qsim::Protocol;

/// Scalar objective interface shared by all baseline optimizers.
/// The counter increments exactly once per `evaluate` call.
pub trait Objective {
    fn evaluate(&mut self, x: &[f64]) -> f64;
    fn evaluations(&self) -> usize;
    fn dim(&self) -> usize;
}

/// Test/benchmark objective backed by a closure.
pub struct FnObjective<F: FnMut(&[f64]) -> f64> {
    f: F,
    dim: usize,
    count: usize,
}

impl<F: FnMut(&[f64]) -> f64> FnObjective<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { f, dim, count: 0 }
    }
}

impl<F: FnMut(&[f64]) -> f64> Objective for FnObjective<F> {
    fn evaluate(&mut self, x: &[f64]) -> f64 {
        self.count += 1;
        (self.f)(x)
    }

    fn evaluations(&self) -> usize {
        self.count
    }

    fn dim(&self) -> usize {
        self.dim
    }
}

/// Mean channel reward over a size-M batch for a single protocol.
pub struct ModelObjective<'a> {
    model: &'a ControlModel,
    channel: ChannelSpec,
    batch_size: usize,
    rng: ChaCha8Rng,
    count: usize,
    dim: usize,
}

impl<'a> ModelObjective<'a> {
    pub fn new(
        model: &'a ControlModel,
        channel: ChannelSpec,
        depth: usize,
        batch_size: usize,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        channel.validate()?;
        if depth == 0 || batch_size == 0 {
            return Err(Error::InvalidConfig(
                "objective depth and batch size must be >= 1".into(),
            ));
        }
        if channel.is_robust() && model.noise_dim() == 0 {
            return Err(Error::NoiselessModel);
        }
        Ok(Self {
            model,
            channel,
            batch_size,
            rng,
            count: 0,
            dim: 2 * depth,
        })
    }

    fn batch_reward(&mut self, protocol: &Protocol) -> Result<f64> {
        let mut total = 0.0;
        match &self.channel {
            ChannelSpec::Exact => {
                let f = self.model.protocol_fidelity(protocol, &[])?;
                total = f * self.batch_size as f64;
            }
            ChannelSpec::Gaussian { sigma } => {
                let f = self.model.protocol_fidelity(protocol, &[])?;
                for _ in 0..self.batch_size {
                    total += gaussian_reward(f, *sigma, &mut self.rng).reward;
                }
            }
            ChannelSpec::QuantumMeasurement => {
                let f = self.model.protocol_fidelity(protocol, &[])?;
                for _ in 0..self.batch_size {
                    total += quantum_measurement_reward(f, &mut self.rng);
                }
            }
            ChannelSpec::Robust { num_draws, support } => {
                let (k, support) = (*num_draws, *support);
                for _ in 0..self.batch_size {
                    total += robust_min_reward(self.model, protocol, k, support, &mut self.rng)?;
                }
            }
        }
        Ok(total / self.batch_size as f64)
    }
}

impl Objective for ModelObjective<'_> {
    fn evaluate(&mut self, x: &[f64]) -> f64 {
        self.count += 1;
        let protocol = Protocol::new(x.to_vec()).expect("even-length point");
        self.batch_reward(&protocol).expect("model evaluation")
    }

    fn evaluations(&self) -> usize {
        self.count
    }

    fn dim(&self) -> usize {
        self.dim
    }
}

/// Shared optimizer knobs. `new(budget)` fills in the standard defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineConfig {
    /// Maximum number of objective evaluations.
    pub budget: usize,
    /// Seed for the stochastic optimizers (CMA-ES, PSO).
    pub seed: u64,
    /// Search box per coordinate for the population optimizers.
    pub bounds: (f64, f64),
    /// Nelder-Mead initial simplex perturbation per coordinate.
    pub simplex_step: f64,
    /// Nelder-Mead termination: reward spread across the simplex.
    pub spread_tolerance: f64,
    /// Powell golden-section bracketing tolerance.
    pub line_tolerance: f64,
    /// CMA-ES initial step size.
    pub cma_sigma0: f64,
    /// CMA-ES population; `None` uses 4 + floor(3 ln dim).
    pub cma_population: Option<usize>,
    /// PSO swarm size.
    pub pso_swarm: usize,
    /// PSO inertia weight.
    pub pso_inertia: f64,
    /// PSO cognitive/social coefficients.
    pub pso_accel: f64,
}

impl BaselineConfig {
    pub fn new(budget: usize) -> Self {
        Self {
            budget,
            seed: 0,
            bounds: (0.0, 4.0),
            simplex_step: 0.05,
            spread_tolerance: 1e-8,
            line_tolerance: 1e-6,
            cma_sigma0: 0.1,
            cma_population: None,
            pso_swarm: 40,
            pso_inertia: 0.729,
            pso_accel: 1.49445,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::InvalidConfig("budget must be >= 1".into()));
        }
        if self.bounds.0 >= self.bounds.1 {
            return Err(Error::InvalidConfig("empty search box".into()));
        }
        if self.pso_swarm == 0 {
            return Err(Error::InvalidConfig("swarm size must be >= 1".into()));
        }
        Ok(())
    }
}

/// One objective evaluation: 1-based evaluation index and the reward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub index: usize,
    pub reward: f64,
}

/// Outcome of one baseline run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineResult {
    pub best_point: Vec<f64>,
    pub best_reward: f64,
    /// Noise-free diagnostic, filled by `with_exact_fidelity`.
    pub exact_fidelity: Option<f64>,
    pub evaluations: usize,
    pub restarts: usize,
    pub trace: Vec<TracePoint>,
}

impl BaselineResult {
    pub fn best_protocol(&self) -> Result<Protocol> {
        Protocol::new(self.best_point.clone())
    }

    pub fn with_exact_fidelity(mut self, model: &ControlModel) -> Result<Self> {
        let f = model.protocol_fidelity(&self.best_protocol()?, &[])?;
        self.exact_fidelity = Some(f);
        Ok(self)
    }

    /// Monotone best-so-far curve derived from the trace.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::NEG_INFINITY;
        self.trace
            .iter()
            .map(|t| {
                best = best.max(t.reward);
                best
            })
            .collect()
    }
}

/// Budget gate plus trace/best bookkeeping shared by the optimizers.
pub(crate) struct Recorder<'a, O: Objective> {
    obj: &'a mut O,
    budget: usize,
    trace: Vec<TracePoint>,
    best_point: Vec<f64>,
    best_reward: f64,
    restarts: usize,
}

impl<'a, O: Objective> Recorder<'a, O> {
    pub fn new(obj: &'a mut O, budget: usize) -> Self {
        Self {
            obj,
            budget,
            trace: Vec::new(),
            best_point: Vec::new(),
            best_reward: f64::NEG_INFINITY,
            restarts: 0,
        }
    }

    /// Evaluates unless the budget is exhausted.
    pub fn try_eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.exhausted() {
            return None;
        }
        let reward = self.obj.evaluate(x);
        self.trace.push(TracePoint {
            index: self.trace.len() + 1,
            reward,
        });
        if reward > self.best_reward {
            self.best_reward = reward;
            self.best_point = x.to_vec();
        }
        Some(reward)
    }

    pub fn exhausted(&self) -> bool {
        self.trace.len() >= self.budget
    }

    pub fn note_restart(&mut self) {
        self.restarts += 1;
    }

    pub fn finish(self) -> BaselineResult {
        BaselineResult {
            best_point: self.best_point,
            best_reward: self.best_reward,
            exact_fidelity: None,
            evaluations: self.trace.len(),
            restarts: self.restarts,
            trace: self.trace,
        }
    }
}

/// Algorithms available to the comparison suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    PgQaoa,
    NelderMead,
    Powell,
    CmaEs,
    Pso,
}

impl Algorithm {
    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::PgQaoa => "pg_qaoa",
            Algorithm::NelderMead => "nelder_mead",
            Algorithm::Powell => "powell",
            Algorithm::CmaEs => "cma_es",
            Algorithm::Pso => "pso",
        }
    }

    pub fn all() -> Vec<Algorithm> {
        vec![
            Algorithm::PgQaoa,
            Algorithm::NelderMead,
            Algorithm::Powell,
            Algorithm::CmaEs,
            Algorithm::Pso,
        ]
    }
}

/// Comparison-suite settings. All algorithms get the same total number of
/// channel reward draws: PG-QAOA runs `iterations` batches of `batch_size`,
/// every baseline gets `iterations` objective calls of `batch_size` draws.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareConfig {
    pub depth: usize,
    pub batch_size: usize,
    pub iterations: usize,
    pub algorithms: Vec<Algorithm>,
    pub learning_rate: f64,
    pub mean_init: MeanInit,
    pub std_init: StdInit,
}

impl CompareConfig {
    pub fn new(depth: usize, batch_size: usize, iterations: usize) -> Self {
        Self {
            depth,
            batch_size,
            iterations,
            algorithms: Algorithm::all(),
            learning_rate: 0.01,
            mean_init: MeanInit::TruncatedNormal { mean: 0.5, std: 0.2 },
            std_init: StdInit::TruncatedLogNormal { mu: -1.0, sigma: 0.3 },
        }
    }
}

/// One row of the algorithm comparison table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareRow {
    pub algorithm: String,
    pub seed: u64,
    pub noise: String,
    pub exact_fidelity: f64,
    pub log_infidelity: f64,
    pub evaluations: usize,
    pub wall_ms: u64,
}

fn log_infidelity(f: f64) -> f64 {
    (1.0 - f).max(f64::MIN_POSITIVE).log10()
}

fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn pg_qaoa_row(
    model: &ControlModel,
    channel: &ChannelSpec,
    cfg: &CompareConfig,
    seed: u64,
) -> Result<CompareRow> {
    let mut rng = seeded_rng(seed, 0);
    let policy = PolicyState::Diagonal(DiagonalGaussianPolicy::init(
        2 * cfg.depth,
        &cfg.mean_init,
        &cfg.std_init,
        &mut rng,
    )?);
    let train_cfg = TrainConfig {
        batch_size: cfg.batch_size,
        iterations: cfg.iterations,
        optimizer: OptimizerSpec::Adam {
            lr: cfg.learning_rate,
            beta1: ADAM_BETA1,
            beta2: ADAM_BETA2,
            epsilon: ADAM_EPSILON,
        },
        lr_decay: LrDecay::default(),
        channel: channel.clone(),
        sigma_floor: SIGMA_FLOOR,
        snapshot_iterations: vec![],
        robust_eval_every: usize::MAX,
        grid_points: crate::noise::DEFAULT_GRID_POINTS,
        mask_offdiagonal: false,
        robust_exhaustive_grid: false,
    };
    let started = std::time::Instant::now();
    let record = train(model, policy, &train_cfg, &mut rng)?;
    let wall_ms = started.elapsed().as_millis() as u64;
    let greedy = model.protocol_fidelity(&record.final_policy.mean_protocol(), &[])?;
    Ok(CompareRow {
        algorithm: Algorithm::PgQaoa.label().into(),
        seed,
        noise: channel.label(),
        exact_fidelity: greedy,
        log_infidelity: log_infidelity(greedy),
        evaluations: cfg.iterations,
        wall_ms,
    })
}

fn baseline_row(
    model: &ControlModel,
    channel: &ChannelSpec,
    cfg: &CompareConfig,
    algorithm: Algorithm,
    seed: u64,
) -> Result<CompareRow> {
    let mut objective = ModelObjective::new(
        model,
        channel.clone(),
        cfg.depth,
        cfg.batch_size,
        seeded_rng(seed, 1),
    )?;
    // Equal-budget comparison: disable early convergence stops so every
    // algorithm spends exactly the configured number of evaluations.
    let bl_cfg = BaselineConfig {
        spread_tolerance: 0.0,
        ..BaselineConfig::new(cfg.iterations).with_seed(seed)
    };
    let x0 = vec![0.5; 2 * cfg.depth];
    let started = std::time::Instant::now();
    let result = match algorithm {
        Algorithm::NelderMead => nelder_mead(&mut objective, &x0, &bl_cfg)?,
        Algorithm::Powell => powell(&mut objective, &x0, &bl_cfg)?,
        Algorithm::CmaEs => cma_es(&mut objective, &x0, &bl_cfg)?,
        Algorithm::Pso => pso(&mut objective, &x0, &bl_cfg)?,
        Algorithm::PgQaoa => unreachable!("handled by pg_qaoa_row"),
    };
    let wall_ms = started.elapsed().as_millis() as u64;
    let result = result.with_exact_fidelity(model)?;
    let exact = result.exact_fidelity.unwrap();
    Ok(CompareRow {
        algorithm: algorithm.label().into(),
        seed,
        noise: channel.label(),
        exact_fidelity: exact,
        log_infidelity: log_infidelity(exact),
        evaluations: result.evaluations,
        wall_ms,
    })
}

/// Runs every algorithm at equal budget for each seed and returns the table.
pub fn compare_suite(
    model: &ControlModel,
    channel: &ChannelSpec,
    cfg: &CompareConfig,
    seeds: &[u64],
) -> Result<Vec<CompareRow>> {
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("compare needs >= 1 seed".into()));
    }
    channel.validate()?;
    let mut rows = Vec::new();
    for &seed in seeds {
        for &alg in &cfg.algorithms {
            let row = match alg {
                Algorithm::PgQaoa => pg_qaoa_row(model, channel, cfg, seed)?,
                _ => baseline_row(model, channel, cfg, alg, seed)?,
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Uniform draw inside the box, used by the population optimizers.
pub(crate) fn uniform_in<R: Rng>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    rng.random_range(lo..hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::build_single_qubit;
    use rand::SeedableRng;

    #[test]
    fn best_reward_is_max_of_trace() {
        let mut obj = FnObjective::new(2, |x: &[f64]| 1.0 - x[0] * x[0] - x[1] * x[1]);
        let cfg = BaselineConfig::new(300);
        let result = nelder_mead(&mut obj, &[0.7, -0.4], &cfg).unwrap();
        let max = result
            .trace
            .iter()
            .map(|t| t.reward)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(result.best_reward, max);
        assert_eq!(result.evaluations, result.trace.len());
    }

    #[test]
    fn model_objective_counts_once_per_call() {
        let model = build_single_qubit().unwrap();
        let rng = ChaCha8Rng::seed_from_u64(3);
        let mut obj =
            ModelObjective::new(&model, ChannelSpec::QuantumMeasurement, 3, 16, rng).unwrap();
        for _ in 0..5 {
            let r = obj.evaluate(&[0.2; 6]);
            assert!((0.0..=1.0).contains(&r));
        }
        assert_eq!(obj.evaluations(), 5);
    }

    #[test]
    fn compare_suite_budget_accounting() {
        let model = build_single_qubit().unwrap();
        let cfg = CompareConfig {
            algorithms: vec![Algorithm::NelderMead, Algorithm::Pso, Algorithm::PgQaoa],
            ..CompareConfig::new(2, 8, 50)
        };
        let rows =
            compare_suite(&model, &ChannelSpec::QuantumMeasurement, &cfg, &[1, 2]).unwrap();
        assert_eq!(rows.len(), 6);
        for row in &rows {
            assert_eq!(row.evaluations, 50, "{}", row.algorithm);
            assert!((0.0..=1.0).contains(&row.exact_fidelity));
        }
    }
}
