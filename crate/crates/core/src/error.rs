use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("basis vectors {i} and {j} are not orthogonal (|<i|j>| = {overlap})")]
    NotOrthonormal { i: usize, j: usize, overlap: f64 },

    #[error("basis has {found} vectors but dimension {dim}")]
    IncompleteBasis { dim: usize, found: usize },

    #[error("operator is not unitary (max |U†U - 1| = {deviation})")]
    NotUnitary { deviation: f64 },

    #[error("operator is not self-adjoint (max |A† - A| = {deviation})")]
    NotSelfAdjoint { deviation: f64 },

    #[error("observable is not ±1-valued (max |A² - 1| = {deviation})")]
    NotDichotomic { deviation: f64 },

    #[error("outcome {outcome} has probability {probability} and cannot be post-selected")]
    ZeroProbabilityOutcome { outcome: usize, probability: f64 },

    #[error("outcome index {outcome} out of range for {count} outcomes")]
    OutcomeOutOfRange { outcome: usize, count: usize },

    #[error("invalid Pauli axis {0}, expected 1, 2 or 3")]
    InvalidAxis(usize),

    #[error("expected a unit vector, norm is {norm}")]
    NotUnitVector { norm: f64 },

    #[error("expected a qubit state, dimension is {dim}")]
    NotQubit { dim: usize },

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("map is not a permutation of the four cells")]
    NotAPermutation,

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("matrix is not symmetric (max |γ - γᵀ| = {deviation})")]
    NotSymmetric { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("matrix is not symplectic (max |AᵀΣA - Σ| = {deviation})")]
    NotSymplectic { deviation: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid model at {path}: {message}")]
    InvalidModel { path: String, message: String },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("malformed report: {0}")]
    MalformedReport(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
