//! Finite-dimensional quantum mechanics: pure states, operators, projective
//! measurement, unitary dynamics and the single-qubit (Bloch sphere) picture.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::TOL_ALG;

pub type C64 = Complex<f64>;

const MAX_DIM: usize = 16;

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// A normalized pure state |Ψ⟩ = Σ_j α_j |j⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Builds a state from amplitudes that must already be normalized.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if (norm - 1.0).abs() > TOL_ALG {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes: v })
    }

    /// Builds a state by rescaling the given amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm < TOL_ALG {
            return Err(Error::ZeroVector);
        }
        Ok(Self { amplitudes: v / c(norm, 0.0) })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| c(a, 0.0)).collect())
    }

    /// Computational basis vector |index⟩.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::OutcomeOutOfRange { outcome: index, count: dim });
        }
        let mut v = DVector::zeros(dim);
        v[index] = c(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amplitudes.as_slice()
    }

    pub(crate) fn as_vector(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        same_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// |⟨self|other⟩|².
    pub fn overlap_sq(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Equality modulo a global phase: |⟨a|b⟩| = 1 within `tol`.
    pub fn eq_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        match self.inner(other) {
            Ok(z) => (z.norm() - 1.0).abs() <= tol,
            Err(_) => false,
        }
    }

    /// Exact componentwise comparison (phase-sensitive).
    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .amplitudes
                .iter()
                .zip(other.amplitudes.iter())
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    fn from_dvector(v: DVector<C64>) -> Self {
        Self { amplitudes: v }
    }
}

/// A square complex matrix acting on a `dim`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<C64>,
}

impl Operator {
    /// Builds an operator from row-major entries.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        Ok(Self { matrix: DMatrix::from_row_slice(dim, dim, &entries) })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&a| c(a, 0.0)).collect())
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    pub fn dagger(&self) -> Operator {
        Self { matrix: self.matrix.adjoint() }
    }

    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self { matrix: &self.matrix * &other.matrix })
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self { matrix: &self.matrix + &other.matrix })
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Self { matrix: &self.matrix * factor }
    }

    /// [self, other] = self·other − other·self.
    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        same_dim(self.dim(), other.dim())?;
        Ok(Self { matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix })
    }

    /// Matrix-vector product without any unitarity check.
    pub fn act(&self, state: &StateVector) -> Result<DVector<C64>> {
        same_dim(self.dim(), state.dim())?;
        Ok(&self.matrix * state.as_vector())
    }

    /// ⟨Ψ|A|Ψ⟩.
    pub fn expectation(&self, state: &StateVector) -> Result<C64> {
        let av = self.act(state)?;
        Ok(state.as_vector().dotc(&av))
    }

    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim();
        max_abs(&(self.matrix.adjoint() * &self.matrix - DMatrix::<C64>::identity(n, n)))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_deviation() <= TOL_ALG
    }

    pub fn selfadjoint_deviation(&self) -> f64 {
        max_abs(&(self.matrix.adjoint() - &self.matrix))
    }

    pub fn is_selfadjoint(&self) -> bool {
        self.selfadjoint_deviation() <= TOL_ALG
    }

    /// Eigenvalues of a self-adjoint operator, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let dev = self.selfadjoint_deviation();
        if dev > TOL_ALG {
            return Err(Error::NotSelfAdjoint { deviation: dev });
        }
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        Ok(ev)
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.dim() == other.dim() && max_abs(&(&self.matrix - &other.matrix)) <= tol
    }
}

/// Kronecker composition of states or operators.
pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}

impl Tensor for StateVector {
    fn tensor(&self, other: &Self) -> Self {
        StateVector::from_dvector(self.amplitudes.kronecker(&other.amplitudes))
    }
}

impl Tensor for Operator {
    fn tensor(&self, other: &Self) -> Self {
        Operator { matrix: self.matrix.kronecker(&other.matrix) }
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// A complete orthonormal basis {|Φ_j⟩}.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    vectors: Vec<StateVector>,
}

impl MeasurementBasis {
    pub fn new(vectors: Vec<StateVector>) -> Result<Self> {
        let dim = vectors.first().map(StateVector::dim).ok_or(Error::IncompleteBasis { dim: 0, found: 0 })?;
        if vectors.len() != dim {
            return Err(Error::IncompleteBasis { dim, found: vectors.len() });
        }
        for v in &vectors {
            same_dim(dim, v.dim())?;
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let overlap = vectors[i].inner(&vectors[j])?.norm();
                if overlap >= TOL_ALG {
                    return Err(Error::NotOrthonormal { i, j, overlap });
                }
            }
        }
        Ok(Self { vectors })
    }

    pub fn computational(dim: usize) -> Result<Self> {
        Self::new((0..dim).map(|j| StateVector::basis(dim, j)).collect::<Result<_>>()?)
    }

    /// Eigenbasis of a Pauli operator, +1 eigenvector first.
    pub fn pauli_eigenbasis(axis: Pauli) -> Self {
        let (up, down) = match axis {
            Pauli::X => (qubit::plus(), qubit::minus()),
            Pauli::Y => (qubit::plus_i(), qubit::minus_i()),
            Pauli::Z => (qubit::zero(), qubit::one()),
        };
        Self { vectors: vec![up, down] }
    }

    /// The two-outcome basis {|ψ⟩, |ψ^⊥⟩} for a qubit state.
    pub fn qubit_with_first(psi: &StateVector) -> Result<Self> {
        if psi.dim() != 2 {
            return Err(Error::NotQubit { dim: psi.dim() });
        }
        let a = psi.amplitudes();
        let perp = StateVector::new(vec![-a[1].conj(), a[0].conj()])?;
        Self::new(vec![psi.clone(), perp])
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    pub fn vector(&self, j: usize) -> &StateVector {
        &self.vectors[j]
    }
}

/// Born-rule outcome distribution (|⟨Φ_j|Ψ⟩|²)_j.
pub fn born_probabilities(state: &StateVector, basis: &MeasurementBasis) -> Result<Vec<f64>> {
    same_dim(basis.dim(), state.dim())?;
    basis.vectors.iter().map(|phi| phi.overlap_sq(state)).collect()
}

/// Post-measurement state for the given outcome.
pub fn collapse(state: &StateVector, basis: &MeasurementBasis, outcome: usize) -> Result<StateVector> {
    let probs = born_probabilities(state, basis)?;
    let probability = *probs
        .get(outcome)
        .ok_or(Error::OutcomeOutOfRange { outcome, count: probs.len() })?;
    if probability <= TOL_ALG {
        return Err(Error::ZeroProbabilityOutcome { outcome, probability });
    }
    Ok(basis.vectors[outcome].clone())
}

pub fn apply_unitary(u: &Operator, state: &StateVector) -> Result<StateVector> {
    let deviation = u.unitarity_deviation();
    if deviation > TOL_ALG {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(StateVector::from_dvector(u.act(state)?))
}

/// True exactly when a unitary cloner for {|Ψ⟩, |Φ⟩} is ruled out by
/// |⟨Φ|Ψ⟩| = |⟨Φ|Ψ⟩|², i.e. when 0 < |⟨Φ|Ψ⟩| < 1.
pub fn cloning_contradiction(psi: &StateVector, phi: &StateVector) -> Result<bool> {
    let overlap = phi.inner(psi)?.norm();
    Ok(overlap > TOL_ALG && overlap < 1.0 - TOL_ALG)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_axis(axis: usize) -> Result<Self> {
        match axis {
            1 => Ok(Pauli::X),
            2 => Ok(Pauli::Y),
            3 => Ok(Pauli::Z),
            other => Err(Error::InvalidAxis(other)),
        }
    }

    pub fn operator(self) -> Operator {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        let entries = match self {
            Pauli::X => vec![z, one, one, z],
            Pauli::Y => vec![z, -i, i, z],
            Pauli::Z => vec![one, z, z, -one],
        };
        Operator { matrix: DMatrix::from_row_slice(2, 2, &entries) }
    }
}

/// σ₁, σ₂, σ₃ for axis 1, 2, 3.
pub fn pauli(axis: usize) -> Result<Operator> {
    Ok(Pauli::from_axis(axis)?.operator())
}

/// (|0⟩⊗|1⟩ − |1⟩⊗|0⟩)/√2.
pub fn singlet() -> StateVector {
    let zero_one = qubit::zero().tensor(&qubit::one());
    let one_zero = qubit::one().tensor(&qubit::zero());
    let v = (zero_one.amplitudes - one_zero.amplitudes) * c(FRAC_1_SQRT_2, 0.0);
    StateVector::from_dvector(v)
}

/// The 50/50 beamsplitter (1/√2)[[1, 1], [1, −1]].
pub fn beamsplitter() -> Operator {
    Operator::from_real(2, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2])
        .expect("2x2 entries")
}

/// Detector statistics (D0, D1) for a photon entering the interferometer
/// in |0⟩, with or without the second beamsplitter in place.
pub fn mach_zehnder(second_beamsplitter: bool) -> [f64; 2] {
    let bs = beamsplitter();
    let mut state = apply_unitary(&bs, &qubit::zero()).expect("beamsplitter is unitary");
    if second_beamsplitter {
        state = apply_unitary(&bs, &state).expect("beamsplitter is unitary");
    }
    let probs = born_probabilities(&state, &MeasurementBasis::computational(2).expect("dim 2"))
        .expect("dimensions agree");
    [probs[0], probs[1]]
}

/// A point on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub fn new(components: [f64; 3]) -> Result<Self> {
        let norm = components.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TOL_ALG {
            return Err(Error::NotUnitVector { norm });
        }
        Ok(Self(components))
    }

    /// Rescales a nonzero vector onto the sphere.
    pub fn normalized(components: [f64; 3]) -> Result<Self> {
        let norm = components.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < TOL_ALG {
            return Err(Error::ZeroVector);
        }
        Ok(Self(components.map(|x| x / norm)))
    }

    /// (sin ϑ cos φ, sin ϑ sin φ, cos ϑ).
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    /// Uniform on the sphere.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = 1.0 - 2.0 * rng.gen::<f64>();
        let phi = rng.gen::<f64>() * std::f64::consts::TAU;
        Self::from_angles(z.clamp(-1.0, 1.0).acos(), phi)
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn antipode(&self) -> BlochVector {
        Self(self.0.map(|x| -x))
    }

    /// (⟨σ₁⟩, ⟨σ₂⟩, ⟨σ₃⟩) of a qubit state.
    pub fn from_state(state: &StateVector) -> Result<Self> {
        if state.dim() != 2 {
            return Err(Error::NotQubit { dim: state.dim() });
        }
        let mut out = [0.0; 3];
        for (slot, axis) in out.iter_mut().zip(Pauli::ALL) {
            *slot = axis.operator().expectation(state)?.re;
        }
        Self::normalized(out)
    }

    /// cos(ϑ/2)|0⟩ + e^{iφ} sin(ϑ/2)|1⟩; the inverse of `from_state` up to phase.
    pub fn to_state(&self) -> StateVector {
        let [x, y, z] = self.0;
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        let (s, co) = (theta / 2.0).sin_cos();
        StateVector::from_dvector(DVector::from_vec(vec![c(co, 0.0), C64::from_polar(s, phi)]))
    }
}

/// |⟨Φ|Ψ⟩|² = (1 + 𝚽·𝚿)/2 for qubits.
pub fn born_bloch(phi: &BlochVector, psi: &BlochVector) -> Result<f64> {
    for v in [phi, psi] {
        let norm = v.dot(v).sqrt();
        if (norm - 1.0).abs() > TOL_ALG {
            return Err(Error::NotUnitVector { norm });
        }
    }
    Ok(((1.0 + phi.dot(psi)) / 2.0).clamp(0.0, 1.0))
}

/// Named single-qubit states.
pub mod qubit {
    use super::*;

    pub fn zero() -> StateVector {
        StateVector::basis(2, 0).expect("dim 2")
    }

    pub fn one() -> StateVector {
        StateVector::basis(2, 1).expect("dim 2")
    }

    pub fn plus() -> StateVector {
        StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).expect("normalized")
    }

    pub fn minus() -> StateVector {
        StateVector::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).expect("normalized")
    }

    pub fn plus_i() -> StateVector {
        StateVector::new(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]).expect("normalized")
    }

    pub fn minus_i() -> StateVector {
        StateVector::new(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)]).expect("normalized")
    }

    /// cos(angle)|0⟩ + sin(angle)|1⟩.
    pub fn real(angle: f64) -> StateVector {
        let (s, co) = angle.sin_cos();
        StateVector::from_real(&[co, s]).expect("normalized")
    }

    /// Resolves "|0>", "|1>", "|+>", "|->", "|+i>", "|-i>".
    pub fn named(name: &str) -> Option<StateVector> {
        match name.trim() {
            "|0>" => Some(zero()),
            "|1>" => Some(one()),
            "|+>" => Some(plus()),
            "|->" => Some(minus()),
            "|+i>" => Some(plus_i()),
            "|-i>" => Some(minus_i()),
            _ => None,
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidParameter(format!("dimension {dim} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

fn same_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
