//! Concrete control problems: single-qubit, multi-qubit I (transverse-field
//! Ising chain) and multi-qubit II (XY chain transfer), each exposing the
//! initial state, target state, the two alternating generators and their
//! noisy variants parameterized by a noise tuple delta.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{
    evolve, fidelity, ground_state, pauli_operator, scaled_identity, HermitianOperator,
    PauliAxis, Protocol, QuantumState,
};

/// Single-qubit quantum speed limit, used only for reporting.
pub const T_QSL_SINGLE_QUBIT: f64 = 2.41;

/// Entries of a distinct-delta decomposition cache before it is cleared.
const DELTA_CACHE_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelName {
    #[serde(rename = "single_qubit")]
    SingleQubit,
    #[serde(rename = "multi_qubit_i")]
    MultiQubitI,
    #[serde(rename = "multi_qubit_ii")]
    MultiQubitII,
}

type GeneratorPair = Arc<(HermitianOperator, HermitianOperator)>;
type Factory = Box<dyn Fn(&[f64]) -> GeneratorPair + Send + Sync>;

pub struct ControlModel {
    name: ModelName,
    num_qubits: usize,
    psi_initial: QuantumState,
    psi_target: QuantumState,
    noise_dim: usize,
    noise_support: Option<(f64, f64)>,
    factory: Factory,
    // Fresh spectral decomposition per distinct delta, memoized on delta
    // rounded to 12 decimal digits.
    cache: Mutex<HashMap<Vec<i64>, GeneratorPair>>,
}

impl std::fmt::Debug for ControlModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ControlModel")
            .field("name", &self.name)
            .field("num_qubits", &self.num_qubits)
            .field("noise_dim", &self.noise_dim)
            .finish()
    }
}

fn cache_key(delta: &[f64]) -> Vec<i64> {
    delta.iter().map(|d| (d * 1e12).round() as i64).collect()
}

impl ControlModel {
    pub fn name(&self) -> ModelName {
        self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn psi_initial(&self) -> &QuantumState {
        &self.psi_initial
    }

    pub fn psi_target(&self) -> &QuantumState {
        &self.psi_target
    }

    pub fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    pub fn noise_support(&self) -> Option<(f64, f64)> {
        self.noise_support
    }

    /// (H_0(delta), H_1(delta)) with memoized spectral decompositions.
    pub fn hamiltonians(&self, delta: &[f64]) -> Result<GeneratorPair> {
        if delta.len() != self.noise_dim {
            return Err(Error::NoiseDimMismatch {
                expected: self.noise_dim,
                got: delta.len(),
            });
        }
        let key = cache_key(delta);
        let mut cache = self.cache.lock().unwrap();
        if let Some(pair) = cache.get(&key) {
            return Ok(Arc::clone(pair));
        }
        let pair = (self.factory)(delta);
        if cache.len() >= DELTA_CACHE_CAP {
            cache.clear();
        }
        cache.insert(key, Arc::clone(&pair));
        Ok(pair)
    }

    /// Applies e^{-iH_1 beta_p} e^{-iH_0 alpha_p} ... e^{-iH_1 beta_1}
    /// e^{-iH_0 alpha_1} to psi_initial and returns the fidelity with
    /// psi_target. An empty delta stands for the noise-free generators.
    pub fn protocol_fidelity(&self, protocol: &Protocol, delta: &[f64]) -> Result<f64> {
        let psi = self.propagate(protocol, delta)?;
        fidelity(&self.psi_target, &psi)
    }

    /// protocol_fidelity against an already-resolved generator pair. Hot
    /// path for batched training: avoids the delta-cache lock per call.
    pub fn protocol_fidelity_with(
        &self,
        pair: &(HermitianOperator, HermitianOperator),
        protocol: &Protocol,
    ) -> Result<f64> {
        let (h0, h1) = (&pair.0, &pair.1);
        let mut psi = self.psi_initial.clone();
        for i in 0..protocol.depth() {
            let (alpha, beta) = protocol.layer(i);
            psi = evolve(&psi, h0, alpha)?;
            psi = evolve(&psi, h1, beta)?;
        }
        fidelity(&self.psi_target, &psi)
    }

    /// Final state after the full protocol.
    pub fn propagate(&self, protocol: &Protocol, delta: &[f64]) -> Result<QuantumState> {
        let zeros;
        let delta = if delta.is_empty() && self.noise_dim > 0 {
            zeros = vec![0.0; self.noise_dim];
            &zeros
        } else {
            delta
        };
        let pair = self.hamiltonians(delta)?;
        let (h0, h1) = (&pair.0, &pair.1);
        let mut psi = self.psi_initial.clone();
        for i in 0..protocol.depth() {
            let (alpha, beta) = protocol.layer(i);
            psi = evolve(&psi, h0, alpha)?;
            psi = evolve(&psi, h1, beta)?;
        }
        Ok(psi)
    }

    /// Intermediate states after every half-layer (H_0 or H_1 application),
    /// starting from psi_initial. Used for Bloch-trajectory export.
    pub fn trajectory(&self, protocol: &Protocol, delta: &[f64]) -> Result<Vec<QuantumState>> {
        let zeros;
        let delta = if delta.is_empty() && self.noise_dim > 0 {
            zeros = vec![0.0; self.noise_dim];
            &zeros
        } else {
            delta
        };
        let pair = self.hamiltonians(delta)?;
        let (h0, h1) = (&pair.0, &pair.1);
        let mut psi = self.psi_initial.clone();
        let mut states = vec![psi.clone()];
        for i in 0..protocol.depth() {
            let (alpha, beta) = protocol.layer(i);
            psi = evolve(&psi, h0, alpha)?;
            states.push(psi.clone());
            psi = evolve(&psi, h1, beta)?;
            states.push(psi.clone());
        }
        Ok(states)
    }
}

/// H_0 = -1/2 sigma^z + 2 sigma^x, H_1 = -1/2 sigma^z - 2 sigma^x, with the
/// initial/target states the ground states of -1/2 sigma^z +- sigma^x.
pub fn build_single_qubit() -> Result<ControlModel> {
    let field = |x_coeff: f64| -> Result<HermitianOperator> {
        pauli_operator(&[(1, PauliAxis::Z)], -0.5, 1)?
            .add(&pauli_operator(&[(1, PauliAxis::X)], x_coeff, 1)?)
    };
    let psi_initial = ground_state(&field(1.0)?)?;
    let psi_target = ground_state(&field(-1.0)?)?;
    let pair = Arc::new((field(2.0)?, field(-2.0)?));
    Ok(ControlModel {
        name: ModelName::SingleQubit,
        num_qubits: 1,
        psi_initial,
        psi_target,
        noise_dim: 0,
        noise_support: None,
        factory: Box::new(move |_| Arc::clone(&pair)),
        cache: Mutex::new(HashMap::new()),
    })
}

/// H[h; w1, w2] = -(1+w1) s^z_1 s^z_2 - (1+w2) s^z_2 s^z_3
///                - sum_{j=3}^{N-1} s^z_j s^z_{j+1} - sum_j (s^z_j + h s^x_j)
/// on an open chain. The noise-free case is w1 = w2 = 0.
fn ising_hamiltonian(n: usize, h: f64, w1: f64, w2: f64) -> Result<HermitianOperator> {
    let mut total = scaled_identity(0.0, n);
    for j in 1..n {
        let coeff = match j {
            1 => -(1.0 + w1),
            2 => -(1.0 + w2),
            _ => -1.0,
        };
        let bond = pauli_operator(&[(j, PauliAxis::Z), (j + 1, PauliAxis::Z)], coeff, n)?;
        total = total.add(&bond)?;
    }
    for j in 1..=n {
        total = total.add(&pauli_operator(&[(j, PauliAxis::Z)], -1.0, n)?)?;
        total = total.add(&pauli_operator(&[(j, PauliAxis::X)], -h, n)?)?;
    }
    Ok(total)
}

/// Transverse-field Ising chain: H_0 = H[-4], H_1 = H[+4]; initial and
/// target states are the ground states of H[-2] and H[+2]. A noise support
/// enables the two-bond Hamiltonian noise delta = (w1, w2).
pub fn build_multi_qubit_i(n: usize, noise_support: Option<(f64, f64)>) -> Result<ControlModel> {
    if n < 2 {
        return Err(Error::InvalidModel(format!(
            "multi-qubit I requires N >= 2, got {n}"
        )));
    }
    if noise_support.is_some() && n < 3 {
        return Err(Error::InvalidModel(format!(
            "noisy multi-qubit I requires N >= 3 (two distinct bonds), got {n}"
        )));
    }
    let psi_initial = ground_state(&ising_hamiltonian(n, -2.0, 0.0, 0.0)?)?;
    let psi_target = ground_state(&ising_hamiltonian(n, 2.0, 0.0, 0.0)?)?;
    let noise_dim = if noise_support.is_some() { 2 } else { 0 };
    let factory: Factory = Box::new(move |delta: &[f64]| {
        let (w1, w2) = match delta {
            [w1, w2] => (*w1, *w2),
            _ => (0.0, 0.0),
        };
        let h0 = ising_hamiltonian(n, -4.0, w1, w2).expect("valid Ising Hamiltonian");
        let h1 = ising_hamiltonian(n, 4.0, w1, w2).expect("valid Ising Hamiltonian");
        Arc::new((h0, h1))
    });
    Ok(ControlModel {
        name: ModelName::MultiQubitI,
        num_qubits: n,
        psi_initial,
        psi_target,
        noise_dim,
        noise_support,
        factory,
        cache: Mutex::new(HashMap::new()),
    })
}

/// Noise sites of the three-body term in the noisy XY chain: three
/// consecutive middle sites (c-1, c, c+1) with c = ceil(N/2).
pub fn xy_noise_sites(n: usize) -> (usize, usize, usize) {
    let c = n.div_ceil(2);
    (c - 1, c, c + 1)
}

/// XY chain transfer: H_0 = 1/2 (sigma^z_N + I),
/// H_1(delta) = sum (s^x s^x + s^y s^y) + delta s^z s^x s^z on the middle
/// sites; |psi_i> = |10...0>, |psi_*> = |0...01>.
pub fn build_multi_qubit_ii(n: usize, noise_support: Option<(f64, f64)>) -> Result<ControlModel> {
    if n < 2 {
        return Err(Error::InvalidModel(format!(
            "multi-qubit II requires N >= 2, got {n}"
        )));
    }
    if noise_support.is_some() && n < 3 {
        return Err(Error::InvalidModel(format!(
            "noisy multi-qubit II requires N >= 3 (three distinct noise sites), got {n}"
        )));
    }
    let dim_msb = 1usize << (n - 1);
    let psi_initial = QuantumState::basis_state(n, dim_msb); // |1 0 ... 0>
    let psi_target = QuantumState::basis_state(n, 1); // |0 ... 0 1>
    let noise_dim = if noise_support.is_some() { 1 } else { 0 };
    let factory: Factory = Box::new(move |delta: &[f64]| {
        let d = delta.first().copied().unwrap_or(0.0);
        let h0 = scaled_identity(0.5, n)
            .add(&pauli_operator(&[(n, PauliAxis::Z)], 0.5, n).unwrap())
            .unwrap();
        let mut h1 = scaled_identity(0.0, n);
        for i in 1..n {
            h1 = h1
                .add(
                    &pauli_operator(&[(i, PauliAxis::X), (i + 1, PauliAxis::X)], 1.0, n)
                        .unwrap(),
                )
                .unwrap();
            h1 = h1
                .add(
                    &pauli_operator(&[(i, PauliAxis::Y), (i + 1, PauliAxis::Y)], 1.0, n)
                        .unwrap(),
                )
                .unwrap();
        }
        if d != 0.0 {
            let (a, b, c) = xy_noise_sites(n);
            h1 = h1
                .add(
                    &pauli_operator(
                        &[(a, PauliAxis::Z), (b, PauliAxis::X), (c, PauliAxis::Z)],
                        d,
                        n,
                    )
                    .unwrap(),
                )
                .unwrap();
        }
        Arc::new((h0, h1))
    });
    Ok(ControlModel {
        name: ModelName::MultiQubitII,
        num_qubits: n,
        psi_initial,
        psi_target,
        noise_dim,
        noise_support,
        factory,
        cache: Mutex::new(HashMap::new()),
    })
}
