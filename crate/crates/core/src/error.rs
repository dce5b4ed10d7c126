use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("site {site} out of range 1..={num_qubits}")]
    SiteOutOfRange { site: usize, num_qubits: usize },

    #[error("duplicate site {0} in Pauli specification")]
    DuplicateSite(usize),

    #[error("matrix is not Hermitian (max elementwise deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("state is not normalized (L2 norm {0})")]
    NotNormalized(f64),

    #[error("degenerate ground space: spectral gap {gap:.3e} below tolerance {tol:.1e}")]
    DegenerateGroundState { gap: f64, tol: f64 },

    #[error("bloch coordinates require a single-qubit state, got {0} qubits")]
    NotSingleQubit(usize),

    #[error("model has noise dimension {expected}, got delta of length {got}")]
    NoiseDimMismatch { expected: usize, got: usize },

    #[error("operation requires a noisy model (noise dimension >= 1)")]
    NoiselessModel,

    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("singular policy transform (scale {0:.3e})")]
    SingularTransform(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("training diverged: mean reward is NaN at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
