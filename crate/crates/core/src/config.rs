//! Experiment configuration: one JSON file per experiment, unknown keys
//! rejected, parse errors reported with the offending field path.

use std::path::{Path, PathBuf};

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{Algorithm, CompareConfig};
use crate::error::{Error, Result};
use crate::models::{
    build_multi_qubit_i, build_multi_qubit_ii, build_single_qubit, ControlModel, ModelName,
};
use crate::pgtrain::{OptimizerSpec, PolicyState, PretrainConfig, TrainConfig};
use crate::policy::{
    CorrelatedGaussianPolicy, DiagonalGaussianPolicy, MeanInit, StdInit, TransformKind,
};

/// Model selection: name, qubit count N, protocol depth p and (for the
/// noisy models) the delta support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: ModelName,
    #[serde(rename = "N")]
    pub num_qubits: usize,
    #[serde(rename = "p")]
    pub depth: usize,
    #[serde(default)]
    pub noise_support: Option<(f64, f64)>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<ControlModel> {
        match self.name {
            ModelName::SingleQubit => {
                if self.num_qubits != 1 {
                    return Err(Error::InvalidConfig(format!(
                        "model.N must be 1 for single_qubit, got {}",
                        self.num_qubits
                    )));
                }
                if self.noise_support.is_some() {
                    return Err(Error::InvalidConfig(
                        "model.noise_support is not supported for single_qubit".into(),
                    ));
                }
                build_single_qubit()
            }
            ModelName::MultiQubitI => build_multi_qubit_i(self.num_qubits, self.noise_support),
            ModelName::MultiQubitII => build_multi_qubit_ii(self.num_qubits, self.noise_support),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::InvalidConfig("model.p must be >= 1".into()));
        }
        self.build().map(|_| ())
    }
}

fn default_transform() -> TransformKind {
    TransformKind::Full
}

/// Policy family and its initializers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    Diagonal {
        mean_init: MeanInit,
        std_init: StdInit,
    },
    Correlated {
        mean_init: MeanInit,
        std_init: StdInit,
        #[serde(default = "default_transform")]
        transform: TransformKind,
    },
}

impl PolicySpec {
    pub fn is_correlated(&self) -> bool {
        matches!(self, PolicySpec::Correlated { .. })
    }

    pub fn transform(&self) -> TransformKind {
        match self {
            PolicySpec::Diagonal { .. } => TransformKind::Full,
            PolicySpec::Correlated { transform, .. } => *transform,
        }
    }

    /// Seeds the initial policy. A correlated policy starts from a freshly
    /// initialized diagonal one (covariance diag(sigma^2)).
    pub fn build(&self, action_dim: usize, rng: &mut ChaCha8Rng) -> Result<PolicyState> {
        match self {
            PolicySpec::Diagonal { mean_init, std_init } => Ok(PolicyState::Diagonal(
                DiagonalGaussianPolicy::init(action_dim, mean_init, std_init, rng)?,
            )),
            PolicySpec::Correlated { mean_init, std_init, transform } => {
                let diag = DiagonalGaussianPolicy::init(action_dim, mean_init, std_init, rng)?;
                Ok(PolicyState::Correlated(CorrelatedGaussianPolicy::from_diagonal(
                    &diag, *transform,
                )))
            }
        }
    }

    pub fn build_diagonal(
        &self,
        action_dim: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<DiagonalGaussianPolicy> {
        let (PolicySpec::Diagonal { mean_init, std_init }
        | PolicySpec::Correlated { mean_init, std_init, .. }) = self;
        DiagonalGaussianPolicy::init(action_dim, mean_init, std_init, rng)
    }
}

/// Diagonal pretraining phase preceding correlated training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PretrainSpec {
    pub iterations: usize,
    /// Overrides the main optimizer for the diagonal phase.
    #[serde(default)]
    pub optimizer: Option<OptimizerSpec>,
}

/// Baseline-comparison settings; unset values fall back to the training
/// batch size / iteration count so all algorithms share one budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CompareSpec {
    #[serde(default)]
    pub algorithms: Option<Vec<Algorithm>>,
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub iterations: Option<usize>,
    #[serde(default)]
    pub learning_rate: Option<f64>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Top-level experiment file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub policy: PolicySpec,
    pub train: TrainConfig,
    #[serde(default)]
    pub pretrain: Option<PretrainSpec>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub compare: Option<CompareSpec>,
}

impl ExperimentConfig {
    pub fn action_dim(&self) -> usize {
        2 * self.model.depth
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        let model = self.model.build()?;
        self.train.validate(&model)?;
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("seeds must be nonempty".into()));
        }
        if let Some(pre) = &self.pretrain {
            if !self.policy.is_correlated() {
                return Err(Error::InvalidConfig(
                    "pretrain requires a correlated policy".into(),
                ));
            }
            if pre.iterations == 0 {
                return Err(Error::InvalidConfig(
                    "pretrain.iterations must be >= 1".into(),
                ));
            }
        }
        Ok(())
    }

    /// Phase configs for `pretrain_then_correlate`.
    pub fn pretrain_config(&self) -> Option<PretrainConfig> {
        let pre = self.pretrain.as_ref()?;
        let mut phase1 = self.train.clone();
        phase1.iterations = pre.iterations;
        if let Some(opt) = &pre.optimizer {
            phase1.optimizer = opt.clone();
        }
        Some(PretrainConfig {
            phase1,
            phase2: self.train.clone(),
            transform: self.policy.transform(),
        })
    }

    pub fn compare_config(&self) -> CompareConfig {
        let spec = self.compare.clone().unwrap_or_default();
        let mut cfg = CompareConfig::new(
            self.model.depth,
            spec.batch_size.unwrap_or(self.train.batch_size),
            spec.iterations.unwrap_or(self.train.iterations),
        );
        if let Some(algorithms) = spec.algorithms {
            cfg.algorithms = algorithms;
        }
        if let Some(lr) = spec.learning_rate {
            cfg.learning_rate = lr;
        } else {
            cfg.learning_rate = self.train.optimizer.lr();
        }
        let (PolicySpec::Diagonal { mean_init, std_init }
        | PolicySpec::Correlated { mean_init, std_init, .. }) = &self.policy;
        cfg.mean_init = mean_init.clone();
        cfg.std_init = std_init.clone();
        cfg
    }
}

/// Parses a config, reporting the JSON path of the offending field.
pub fn parse_config(json: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        Error::InvalidConfig(format!("at `{}`: {}", e.path(), e.inner()))
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}
