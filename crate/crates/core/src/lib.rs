//! Executable models from quantum foundations.
//!
//! - [`hilbert`]: finite-dimensional pure-state quantum mechanics and qubits.
//! - [`toy_theory`]: the four-cell epistemically restricted toy theory.
//! - [`ontology`]: finite ontological models and the Kochen–Specker qubit model.
//! - [`phase_space`]: Gaussian Liouville mechanics under a resolution restriction.
//! - [`nonclassicality`]: CHSH, Hardy's ontic-state counting bound, and PBR.
//! - [`experiment`]: configurable experiment runner and report formats used by
//!   the `qfound` binary.

pub mod error;
pub mod experiment;
pub mod hilbert;
pub mod nonclassicality;
pub mod ontology;
pub mod phase_space;
pub mod toy_theory;

pub use error::{Error, Result};

/// Tolerance for algebraic identities on small matrices.
pub const TOL_ALG: f64 = 1e-12;

/// Tolerance for positive semidefiniteness checks.
pub const TOL_PSD: f64 = 1e-10;
