//! Python bindings for the pgqaoa library: control models, Gaussian
//! policies, policy-gradient training and the baseline comparison suite.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pgqaoa::config::parse_config;
use pgqaoa::models::ControlModel;
use pgqaoa::noise::{average_fidelity, worst_case_fidelity, ChannelSpec};
use pgqaoa::pgtrain::{pretrain_then_correlate, train, PolicyCheckpoint, PolicyState, TrainRecord};
use pgqaoa::qsim::{bloch_coordinates, Protocol};

fn err(e: pgqaoa::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn protocol(durations: Vec<f64>) -> PyResult<Protocol> {
    Protocol::new(durations).map_err(err)
}

/// A bang-bang control problem: generator pair, initial and target state.
#[pyclass(frozen, name = "Model")]
struct Model {
    inner: ControlModel,
}

#[pymethods]
impl Model {
    /// Single-qubit model, H = -sigma_z/2 +- 2 sigma_x.
    #[staticmethod]
    fn single_qubit() -> PyResult<Self> {
        Ok(Self { inner: pgqaoa::models::build_single_qubit().map_err(err)? })
    }

    /// Transverse-field Ising chain with field switching between -4 and 4.
    /// `noise_support` enables the two-bond coupling perturbation.
    #[staticmethod]
    #[pyo3(signature = (n, noise_support=None))]
    fn multi_qubit_i(n: usize, noise_support: Option<(f64, f64)>) -> PyResult<Self> {
        Ok(Self { inner: pgqaoa::models::build_multi_qubit_i(n, noise_support).map_err(err)? })
    }

    /// XY spin chain transferring one excitation across the chain.
    /// `noise_support` enables the central-bond perturbation.
    #[staticmethod]
    #[pyo3(signature = (n, noise_support=None))]
    fn multi_qubit_ii(n: usize, noise_support: Option<(f64, f64)>) -> PyResult<Self> {
        Ok(Self { inner: pgqaoa::models::build_multi_qubit_ii(n, noise_support).map_err(err)? })
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    #[getter]
    fn noise_dim(&self) -> usize {
        self.inner.noise_dim()
    }

    /// Exact fidelity of a protocol; `delta` selects a noise realization
    /// (empty or omitted means noise-free generators).
    #[pyo3(signature = (durations, delta=None))]
    fn fidelity(&self, durations: Vec<f64>, delta: Option<Vec<f64>>) -> PyResult<f64> {
        let x = protocol(durations)?;
        self.inner
            .protocol_fidelity(&x, delta.as_deref().unwrap_or(&[]))
            .map_err(err)
    }

    /// Mean fidelity over a midpoint grid on the noise support.
    #[pyo3(signature = (durations, support, grid_points=11))]
    fn average_fidelity(
        &self,
        durations: Vec<f64>,
        support: (f64, f64),
        grid_points: usize,
    ) -> PyResult<f64> {
        let x = protocol(durations)?;
        average_fidelity(&self.inner, &x, support, grid_points).map_err(err)
    }

    /// Minimum fidelity over a midpoint grid on the noise support.
    #[pyo3(signature = (durations, support, grid_points=11))]
    fn worst_case_fidelity(
        &self,
        durations: Vec<f64>,
        support: (f64, f64),
        grid_points: usize,
    ) -> PyResult<f64> {
        let x = protocol(durations)?;
        worst_case_fidelity(&self.inner, &x, support, grid_points).map_err(err)
    }

    /// Bloch vectors (x, y, z) after every half-layer, single-qubit only.
    fn bloch_trajectory(&self, durations: Vec<f64>) -> PyResult<Vec<(f64, f64, f64)>> {
        let x = protocol(durations)?;
        let states = self.inner.trajectory(&x, &[]).map_err(err)?;
        states
            .iter()
            .map(|s| bloch_coordinates(s).map_err(err))
            .collect()
    }
}

/// A Gaussian policy over protocols (diagonal or correlated covariance).
#[pyclass(name = "Policy", skip_from_py_object)]
#[derive(Clone)]
struct Policy {
    inner: PolicyState,
}

#[pymethods]
impl Policy {
    /// Independent truncated normals with the given means and stds.
    #[staticmethod]
    fn diagonal(means: Vec<f64>, stds: Vec<f64>) -> PyResult<Self> {
        let inner = PolicyCheckpoint::Diagonal { means, stds }
            .into_policy()
            .map_err(err)?;
        Ok(Self { inner })
    }

    /// Restores a policy from the JSON checkpoint written by the CLI.
    #[staticmethod]
    fn from_checkpoint_json(json: &str) -> PyResult<Self> {
        let ckpt: PolicyCheckpoint =
            serde_json::from_str(json).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner: ckpt.into_policy().map_err(err)? })
    }

    fn checkpoint_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.checkpoint())
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn action_dim(&self) -> usize {
        self.inner.action_dim()
    }

    /// The policy mean as a protocol (the greedy deployment choice).
    fn mean_protocol(&self) -> Vec<f64> {
        self.inner.mean_protocol().durations().to_vec()
    }

    /// Draws `m` protocols with a fresh seeded generator.
    fn sample(&self, m: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.inner
            .sample_batch(m, &mut rng)
            .iter()
            .map(|x| x.durations().to_vec())
            .collect()
    }
}

/// Outcome of a training run.
#[pyclass(frozen, name = "TrainResult")]
struct TrainResult {
    #[pyo3(get)]
    iterations: usize,
    /// Exact fidelity of the final policy mean.
    #[pyo3(get)]
    greedy_fidelity: f64,
    /// Batch-exact mean fidelity at the last iteration.
    #[pyo3(get)]
    final_exact_mean: f64,
    /// (iteration, mean_reward, exact_mean_fidelity, greedy_fidelity) rows.
    #[pyo3(get)]
    learning_curve: Vec<(usize, f64, f64, f64)>,
    policy: Policy,
}

#[pymethods]
impl TrainResult {
    fn policy(&self) -> Policy {
        self.policy.clone()
    }
}

fn to_result(record: TrainRecord, model: &ControlModel) -> PyResult<TrainResult> {
    let last = record.final_log();
    let greedy = model
        .protocol_fidelity(&record.final_policy.mean_protocol(), &[])
        .map_err(err)?;
    Ok(TrainResult {
        iterations: record.iterations.len(),
        greedy_fidelity: greedy,
        final_exact_mean: last.exact_mean_fidelity,
        learning_curve: record
            .iterations
            .iter()
            .map(|l| (l.iteration, l.mean_reward, l.exact_mean_fidelity, l.greedy_fidelity))
            .collect(),
        policy: Policy { inner: record.final_policy.clone() },
    })
}

/// Trains from an experiment-config JSON string (same schema as the CLI)
/// for one seed and returns the learning curve plus the final policy.
#[pyfunction]
fn train_experiment(config_json: &str, seed: u64) -> PyResult<TrainResult> {
    let config = parse_config(config_json).map_err(err)?;
    let model = config.model.build().map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let record = if let Some(pre) = config.pretrain_config() {
        let initial = config
            .policy
            .build_diagonal(config.action_dim(), &mut rng)
            .map_err(err)?;
        pretrain_then_correlate(&model, initial, &pre, &mut rng).map_err(err)?
    } else {
        let policy = config.policy.build(config.action_dim(), &mut rng).map_err(err)?;
        train(&model, policy, &config.train, &mut rng).map_err(err)?
    };
    to_result(record, &model)
}

/// Trains a given policy on a model with an explicit reward channel,
/// bypassing the config file. `channel_json` uses the config schema,
/// e.g. `{"kind": "gaussian", "sigma": 0.1}`.
#[pyfunction]
#[pyo3(signature = (model, policy, channel_json, batch_size, iterations, learning_rate, seed))]
fn train_policy(
    model: &Model,
    policy: &Policy,
    channel_json: &str,
    batch_size: usize,
    iterations: usize,
    learning_rate: f64,
    seed: u64,
) -> PyResult<TrainResult> {
    let channel: ChannelSpec =
        serde_json::from_str(channel_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let config = pgqaoa::pgtrain::TrainConfig {
        batch_size,
        iterations,
        optimizer: pgqaoa::pgtrain::OptimizerSpec::Adam {
            lr: learning_rate,
            beta1: pgqaoa::pgtrain::ADAM_BETA1,
            beta2: pgqaoa::pgtrain::ADAM_BETA2,
            epsilon: pgqaoa::pgtrain::ADAM_EPSILON,
        },
        lr_decay: Default::default(),
        channel,
        sigma_floor: pgqaoa::policy::SIGMA_FLOOR,
        snapshot_iterations: vec![],
        robust_eval_every: usize::MAX,
        grid_points: pgqaoa::noise::DEFAULT_GRID_POINTS,
        mask_offdiagonal: false,
        robust_exhaustive_grid: false,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let record = train(&model.inner, policy.inner.clone(), &config, &mut rng).map_err(err)?;
    to_result(record, &model.inner)
}

#[pymodule]
fn pgqaoa_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Policy>()?;
    m.add_class::<TrainResult>()?;
    m.add_function(wrap_pyfunction!(train_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(train_policy, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
