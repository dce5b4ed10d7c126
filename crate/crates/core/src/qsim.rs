//! Complex statevector kernel: Pauli-operator construction, Hermitian
//! spectral decomposition, exact unitary time evolution, fidelities,
//! ground states and single-qubit Bloch coordinates.
//!
//! Evolution uses the cached spectral decomposition of each Hamiltonian:
//! e^{-iHt}|psi> = V e^{-i Lambda t} V^dag |psi>. The decomposition is
//! computed once per operator and reused across all time steps.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const NORM_TOL: f64 = 1e-10;
const HERMITICITY_TOL: f64 = 1e-12;
const DEGENERACY_TOL: f64 = 1e-9;

/// Normalized complex amplitude vector over a 2^N-dimensional Hilbert space.
#[derive(Debug, Clone)]
pub struct QuantumState {
    amplitudes: DVector<C64>,
    num_qubits: usize,
}

impl QuantumState {
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "state length {dim} is not a power of two"
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        Ok(Self { amplitudes, num_qubits })
    }

    /// Computational basis state |index> on `num_qubits` qubits.
    /// Qubit 1 is the most significant bit of `index`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Self {
        let dim = 1usize << num_qubits;
        assert!(index < dim, "basis index out of range");
        let mut amps = DVector::from_element(dim, C64::new(0.0, 0.0));
        amps[index] = C64::new(1.0, 0.0);
        Self { amplitudes: amps, num_qubits }
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Constructs a state without re-checking normalization. Internal use
    /// on the output of unitary evolution, which preserves the norm.
    fn from_normalized(amplitudes: DVector<C64>, num_qubits: usize) -> Self {
        Self { amplitudes, num_qubits }
    }
}

struct Spectral {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

/// Dense Hermitian matrix with a lazily computed, cached spectral
/// decomposition used as a unitary-propagator factory.
pub struct HermitianOperator {
    matrix: DMatrix<C64>,
    num_qubits: usize,
    spectral: OnceLock<Spectral>,
}

impl std::fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HermitianOperator")
            .field("num_qubits", &self.num_qubits)
            .field("dim", &self.matrix.nrows())
            .finish()
    }
}

impl Clone for HermitianOperator {
    fn clone(&self) -> Self {
        // The spectral cache is recomputed on demand.
        Self {
            matrix: self.matrix.clone(),
            num_qubits: self.num_qubits,
            spectral: OnceLock::new(),
        }
    }
}

impl HermitianOperator {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() || n == 0 || !n.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "operator shape {}x{} is not a square power of two",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let mut max_dev = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let dev = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
                if dev > max_dev {
                    max_dev = dev;
                }
            }
        }
        if max_dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian(max_dev));
        }
        Ok(Self {
            num_qubits: n.trailing_zeros() as usize,
            matrix,
            spectral: OnceLock::new(),
        })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn spectral(&self) -> &Spectral {
        self.spectral.get_or_init(|| {
            let eig = SymmetricEigen::new(self.matrix.clone());
            Spectral {
                eigenvalues: eig.eigenvalues,
                eigenvectors: eig.eigenvectors,
            }
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.spectral().eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.spectral().eigenvectors
    }

    /// Sum of two Hermitian operators of equal dimension.
    pub fn add(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot add operators of dim {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        HermitianOperator::new(&self.matrix + &other.matrix)
    }
}

/// Pauli axis of a single tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    fn matrix(self) -> DMatrix<C64> {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        match self {
            // Convention: sigma^z |0> = +|0>, sigma^z |1> = -|1>.
            PauliAxis::X => DMatrix::from_row_slice(2, 2, &[z, one, one, z]),
            PauliAxis::Y => DMatrix::from_row_slice(
                2,
                2,
                &[z, C64::new(0.0, -1.0), C64::new(0.0, 1.0), z],
            ),
            PauliAxis::Z => DMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
        }
    }
}

/// coefficient x (tensor product of the listed Pauli matrices at the listed
/// 1-based sites, identity elsewhere). Site 1 is the leftmost tensor factor,
/// i.e. the most significant bit of the basis index.
pub fn pauli_operator(
    spec: &[(usize, PauliAxis)],
    coefficient: f64,
    num_qubits: usize,
) -> Result<HermitianOperator> {
    let mut seen = vec![false; num_qubits + 1];
    for &(site, _) in spec {
        if site < 1 || site > num_qubits {
            return Err(Error::SiteOutOfRange { site, num_qubits });
        }
        if seen[site] {
            return Err(Error::DuplicateSite(site));
        }
        seen[site] = true;
    }
    let identity2 = DMatrix::<C64>::identity(2, 2);
    let mut result = DMatrix::<C64>::identity(1, 1);
    for site in 1..=num_qubits {
        let factor = spec
            .iter()
            .find(|&&(s, _)| s == site)
            .map(|&(_, axis)| axis.matrix())
            .unwrap_or_else(|| identity2.clone());
        result = result.kronecker(&factor);
    }
    result *= C64::new(coefficient, 0.0);
    HermitianOperator::new(result)
}

/// Identity operator scaled by a real coefficient.
pub fn scaled_identity(coefficient: f64, num_qubits: usize) -> HermitianOperator {
    let dim = 1usize << num_qubits;
    HermitianOperator::new(DMatrix::identity(dim, dim) * C64::new(coefficient, 0.0))
        .expect("scaled identity is Hermitian")
}

/// e^{-iHt}|psi> via the cached spectral decomposition.
pub fn evolve(state: &QuantumState, h: &HermitianOperator, t: f64) -> Result<QuantumState> {
    if state.dim() != h.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs operator dim {}",
            state.dim(),
            h.dim()
        )));
    }
    let spec = h.spectral();
    // c = V^dag psi, then phase, then back: V (e^{-i lambda t} c)
    let mut c = spec.eigenvectors.ad_mul(&DMatrix::from_column_slice(
        state.dim(),
        1,
        state.amplitudes().as_slice(),
    ));
    for (k, lam) in spec.eigenvalues.iter().enumerate() {
        let phase = C64::from_polar(1.0, -lam * t);
        c[(k, 0)] *= phase;
    }
    let out = &spec.eigenvectors * c;
    Ok(QuantumState::from_normalized(
        DVector::from_column_slice(out.as_slice()),
        state.num_qubits(),
    ))
}

/// |<a|b>|^2, clamped to [0, 1].
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dims {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let overlap: C64 = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes().iter())
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(overlap.norm_sqr().clamp(0.0, 1.0))
}

/// Lowest-eigenvalue eigenvector, with the global phase fixed so the first
/// component of largest magnitude is real and positive. A ground-space
/// degeneracy (gap below 1e-9) is reported as an error.
pub fn ground_state(h: &HermitianOperator) -> Result<QuantumState> {
    let spec = h.spectral();
    let n = spec.eigenvalues.len();
    let mut min_idx = 0;
    for k in 1..n {
        if spec.eigenvalues[k] < spec.eigenvalues[min_idx] {
            min_idx = k;
        }
    }
    let e0 = spec.eigenvalues[min_idx];
    let mut gap = f64::INFINITY;
    for k in 0..n {
        if k != min_idx {
            let d = spec.eigenvalues[k] - e0;
            if d < gap {
                gap = d;
            }
        }
    }
    if n > 1 && gap < DEGENERACY_TOL {
        return Err(Error::DegenerateGroundState { gap, tol: DEGENERACY_TOL });
    }
    let mut v: DVector<C64> = spec.eigenvectors.column(min_idx).into_owned();
    let norm = v.norm();
    v /= C64::new(norm, 0.0);
    // Phase convention: largest-magnitude component real positive. Ties on
    // the magnitude are broken by the first such component.
    let mut best = 0;
    let mut best_mag = 0.0;
    for (k, amp) in v.iter().enumerate() {
        let m = amp.norm();
        if m > best_mag + 1e-15 {
            best_mag = m;
            best = k;
        }
    }
    let pivot = v[best];
    let phase = pivot.conj() / C64::new(pivot.norm(), 0.0);
    v *= phase;
    QuantumState::new(v)
}

/// (<sigma^x>, <sigma^y>, <sigma^z>) of a single-qubit pure state.
pub fn bloch_coordinates(state: &QuantumState) -> Result<(f64, f64, f64)> {
    if state.num_qubits() != 1 {
        return Err(Error::NotSingleQubit(state.num_qubits()));
    }
    let a = state.amplitudes()[0];
    let b = state.amplitudes()[1];
    let w = a.conj() * b;
    Ok((2.0 * w.re, 2.0 * w.im, a.norm_sqr() - b.norm_sqr()))
}

/// The 2p real durations (alpha_1, beta_1, ..., alpha_p, beta_p) of one
/// bang-bang schedule. Negative entries are allowed but observable via
/// [`Protocol::negative_count`].
#[derive(Debug, Clone, PartialEq)]
pub struct Protocol {
    durations: Vec<f64>,
}

impl Protocol {
    pub fn new(durations: Vec<f64>) -> Result<Self> {
        if durations.len() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "protocol length {} is odd; expected 2p entries",
                durations.len()
            )));
        }
        Ok(Self { durations })
    }

    pub fn depth(&self) -> usize {
        self.durations.len() / 2
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    /// (alpha_i, beta_i) of layer i (0-based).
    pub fn layer(&self, i: usize) -> (f64, f64) {
        (self.durations[2 * i], self.durations[2 * i + 1])
    }

    /// T = sum of all entries.
    pub fn total_duration(&self) -> f64 {
        self.durations.iter().sum()
    }

    pub fn negative_count(&self) -> usize {
        self.durations.iter().filter(|&&d| d < 0.0).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_state(rng: &mut ChaCha8Rng, num_qubits: usize) -> QuantumState {
        let dim = 1 << num_qubits;
        let mut v = DVector::from_fn(dim, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let norm = v.norm();
        v /= c(norm, 0.0);
        QuantumState::new(v).unwrap()
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, num_qubits: usize) -> HermitianOperator {
        let dim = 1 << num_qubits;
        let a = DMatrix::from_fn(dim, dim, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let h = (&a + a.adjoint()) * c(0.5, 0.0);
        HermitianOperator::new(h).unwrap()
    }

    /// Independent oracle: scaling-and-squaring matrix exponential with a
    /// truncated Taylor series on the scaled matrix.
    fn expm_oracle(m: &DMatrix<C64>) -> DMatrix<C64> {
        let n = m.nrows();
        let norm: f64 = m.iter().map(|x| x.norm()).sum();
        let s = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let scaled = m / c(2f64.powi(s as i32), 0.0);
        let mut result = DMatrix::<C64>::identity(n, n);
        let mut term = DMatrix::<C64>::identity(n, n);
        for k in 1..=24 {
            term = (&term * &scaled) / c(k as f64, 0.0);
            result += &term;
        }
        for _ in 0..s {
            result = &result * &result;
        }
        result
    }

    #[test]
    fn pauli_z_single_site() {
        let op = pauli_operator(&[(1, PauliAxis::Z)], 1.0, 1).unwrap();
        assert_eq!(op.matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(op.matrix()[(1, 1)], c(-1.0, 0.0));
        assert_eq!(op.matrix()[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn pauli_zz_negated() {
        let op = pauli_operator(&[(1, PauliAxis::Z), (2, PauliAxis::Z)], -1.0, 2).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| op.matrix()[(i, i)].re).collect();
        assert_eq!(diag, vec![-1.0, 1.0, 1.0, -1.0]);
    }

    #[test]
    fn pauli_x_scaled() {
        let op = pauli_operator(&[(1, PauliAxis::X)], 2.0, 1).unwrap();
        assert_eq!(op.matrix()[(0, 1)], c(2.0, 0.0));
        assert_eq!(op.matrix()[(1, 0)], c(2.0, 0.0));
        assert_eq!(op.matrix()[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn pauli_site_errors() {
        assert!(matches!(
            pauli_operator(&[(3, PauliAxis::X)], 1.0, 2),
            Err(Error::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            pauli_operator(&[(1, PauliAxis::X), (1, PauliAxis::Z)], 1.0, 2),
            Err(Error::DuplicateSite(1))
        ));
    }

    #[test]
    fn pauli_outputs_are_hermitian_exactly() {
        // Hermiticity is checked at construction with zero slack for these.
        for axes in [[PauliAxis::X, PauliAxis::Y], [PauliAxis::Y, PauliAxis::Z]] {
            let spec = [(1, axes[0]), (3, axes[1])];
            pauli_operator(&spec, -2.5, 3).unwrap();
        }
    }

    #[test]
    fn evolve_at_zero_time_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_hermitian(&mut rng, 2);
        let psi = random_state(&mut rng, 2);
        let out = evolve(&psi, &h, 0.0).unwrap();
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes().iter()) {
            assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn evolve_sigma_x_half_pi() {
        let h = pauli_operator(&[(1, PauliAxis::X)], 1.0, 1).unwrap();
        let psi = QuantumState::basis_state(1, 0);
        let out = evolve(&psi, &h, std::f64::consts::FRAC_PI_2).unwrap();
        // e^{-i sigma^x pi/2} = -i sigma^x, so |0> -> -i|1>
        assert!((out.amplitudes()[0]).norm() <= 1e-10);
        assert!((out.amplitudes()[1] - c(0.0, -1.0)).norm() <= 1e-10);
    }

    #[test]
    fn evolve_matches_expm_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let h = random_hermitian(&mut rng, 3);
            let psi = random_state(&mut rng, 3);
            let t = 4.0 * (rng.random::<f64>() - 0.5);
            let out = evolve(&psi, &h, t).unwrap();
            let u = expm_oracle(&(h.matrix() * c(0.0, -t)));
            let expected = &u
                * DMatrix::from_column_slice(psi.dim(), 1, psi.amplitudes().as_slice());
            for (k, a) in out.amplitudes().iter().enumerate() {
                assert!(
                    (a - expected[(k, 0)]).norm() <= 1e-8,
                    "amplitude {k} deviates"
                );
            }
        }
    }

    #[test]
    fn evolve_preserves_norm_and_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let h = random_hermitian(&mut rng, 2);
            let psi = random_state(&mut rng, 2);
            let (t1, t2) = (rng.random::<f64>() * 2.0, rng.random::<f64>() * 2.0);
            let a = evolve(&evolve(&psi, &h, t1).unwrap(), &h, t2).unwrap();
            let b = evolve(&psi, &h, t1 + t2).unwrap();
            assert!((a.amplitudes().norm() - 1.0).abs() <= 1e-10);
            for (x, y) in a.amplitudes().iter().zip(b.amplitudes().iter()) {
                assert!((x - y).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn fidelity_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = random_state(&mut rng, 2);
        assert_abs_diff_eq!(fidelity(&psi, &psi).unwrap(), 1.0, epsilon = 1e-12);
        let zero = QuantumState::basis_state(1, 0);
        let one = QuantumState::basis_state(1, 1);
        assert_abs_diff_eq!(fidelity(&zero, &one).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_global_phase_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_state(&mut rng, 2);
        let b = random_state(&mut rng, 2);
        let f0 = fidelity(&a, &b).unwrap();
        let phase = C64::from_polar(1.0, 1.234);
        let a2 = QuantumState::new(a.amplitudes() * phase).unwrap();
        let b2 = QuantumState::new(b.amplitudes() * C64::from_polar(1.0, -0.7)).unwrap();
        assert_abs_diff_eq!(fidelity(&a2, &b2).unwrap(), f0, epsilon = 1e-12);
    }

    #[test]
    fn ground_state_sigma_z() {
        let h = pauli_operator(&[(1, PauliAxis::Z)], 1.0, 1).unwrap();
        let gs = ground_state(&h).unwrap();
        assert!((gs.amplitudes()[0]).norm() <= 1e-10);
        assert!((gs.amplitudes()[1] - c(1.0, 0.0)).norm() <= 1e-10);
    }

    #[test]
    fn ground_state_analytic_two_level() {
        // H = -1/2 sigma^z + sigma^x: ground energy -sqrt(5)/2,
        // eigenvector ~ (0.8507, -0.5257) from 2x2 diagonalization.
        let h = pauli_operator(&[(1, PauliAxis::Z)], -0.5, 1)
            .unwrap()
            .add(&pauli_operator(&[(1, PauliAxis::X)], 1.0, 1).unwrap())
            .unwrap();
        let gs = ground_state(&h).unwrap();
        let e0 = h.eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(e0, -5f64.sqrt() / 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(gs.amplitudes()[0].re, 0.85065080835204, epsilon = 1e-8);
        assert_abs_diff_eq!(gs.amplitudes()[1].re, -0.525731112119134, epsilon = 1e-8);
    }

    #[test]
    fn ground_state_shift_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let h = random_hermitian(&mut rng, 2);
        let shifted = h.add(&scaled_identity(3.7, 2)).unwrap();
        let a = ground_state(&h).unwrap();
        let b = ground_state(&shifted).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes().iter()) {
            assert!((x - y).norm() <= 1e-8);
        }
    }

    #[test]
    fn ground_state_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_hermitian(&mut rng, 3);
        let gs = ground_state(&h).unwrap();
        let e0 = h.eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
        let hv = h.matrix()
            * DMatrix::from_column_slice(gs.dim(), 1, gs.amplitudes().as_slice());
        for (k, amp) in gs.amplitudes().iter().enumerate() {
            assert!((hv[(k, 0)] - amp * c(e0, 0.0)).norm() <= 1e-9);
        }
    }

    #[test]
    fn ground_state_degenerate_errors() {
        let h = pauli_operator(&[(1, PauliAxis::Z), (2, PauliAxis::Z)], 1.0, 2).unwrap();
        // Eigenvalues (1, -1, -1, 1): doubly degenerate ground space.
        assert!(matches!(
            ground_state(&h),
            Err(Error::DegenerateGroundState { .. })
        ));
    }

    #[test]
    fn bloch_reference_states() {
        let s = 1.0 / 2f64.sqrt();
        let zero = QuantumState::basis_state(1, 0);
        let (x, y, z) = bloch_coordinates(&zero).unwrap();
        assert_abs_diff_eq!(x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z, 1.0, epsilon = 1e-12);

        let plus = QuantumState::new(DVector::from_vec(vec![c(s, 0.0), c(s, 0.0)])).unwrap();
        let (x, y, _) = bloch_coordinates(&plus).unwrap();
        assert_abs_diff_eq!(x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y, 0.0, epsilon = 1e-12);

        let plus_i =
            QuantumState::new(DVector::from_vec(vec![c(s, 0.0), c(0.0, s)])).unwrap();
        let (x, y, z) = bloch_coordinates(&plus_i).unwrap();
        assert_abs_diff_eq!(x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(z, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn bloch_unit_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let psi = random_state(&mut rng, 1);
            let (x, y, z) = bloch_coordinates(&psi).unwrap();
            assert_abs_diff_eq!(x * x + y * y + z * z, 1.0, epsilon = 1e-10);
        }
        let two = random_state(&mut rng, 2);
        assert!(matches!(
            bloch_coordinates(&two),
            Err(Error::NotSingleQubit(2))
        ));
    }

    #[test]
    fn protocol_accounting() {
        let p = Protocol::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(p.depth(), 2);
        assert_eq!(p.total_duration(), 10.0);
        assert_eq!(Protocol::new(vec![]).unwrap().total_duration(), 0.0);
        let q = Protocol::new(vec![-0.1, 0.2]).unwrap();
        assert_eq!(q.negative_count(), 1);
        assert!(Protocol::new(vec![1.0, 2.0, 3.0]).is_err());
    }
}
