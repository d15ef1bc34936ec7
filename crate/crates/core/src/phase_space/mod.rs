//! Gaussian epistemic states on classical phase space, restricted so that no
//! state is sharper than the resolution scale λ allows: γ + iλΣ ⪰ 0.
//!
//! Coordinates are ordered (x₁, p₁, x₂, p₂, …). The covariance γ is the
//! plain covariance of those coordinates, so a single mode with
//! γ = diag(½, ½) at λ = ½ sits exactly on the boundary.

mod epr;
mod symplectic;

use std::fmt;

use nalgebra::{Cholesky, Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub use epr::{condition_on_position, epr_state, Particle};
pub use symplectic::{symplectic_form, SymplecticMatrix};

use crate::error::{Error, Result};
use crate::{TOL_ALG, TOL_PSD};

/// The resolution scale λ ≥ 0. Defaults to ½; zero switches the restriction off.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct RrScale(f64);

impl RrScale {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda >= 0.0 {
            Ok(Self(lambda))
        } else {
            Err(Error::InvalidParameter(format!("resolution scale {lambda} must be nonnegative")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for RrScale {
    fn default() -> Self {
        Self(0.5)
    }
}

impl fmt::Display for RrScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Tolerance for semidefiniteness, scaled by the size of the matrix entries.
/// Eigenvalue round-off grows with ‖γ‖, and strongly squeezed states carry
/// entries of order 1/s².
fn psd_tolerance(m: &DMatrix<f64>) -> f64 {
    TOL_PSD * m.amax().max(1.0)
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().min()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GaussianDocument", into = "GaussianDocument")]
pub struct GaussianMacrostate {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianDocument {
    n_modes: usize,
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

impl TryFrom<GaussianDocument> for GaussianMacrostate {
    type Error = Error;

    fn try_from(doc: GaussianDocument) -> Result<Self> {
        let d = 2 * doc.n_modes;
        if doc.cov.len() != d || doc.cov.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: doc.cov.len() });
        }
        let cov = DMatrix::from_fn(d, d, |i, j| doc.cov[i][j]);
        Self::new(DVector::from_vec(doc.mean), cov)
    }
}

impl From<GaussianMacrostate> for GaussianDocument {
    fn from(g: GaussianMacrostate) -> Self {
        let d = g.dim();
        Self {
            n_modes: g.n_modes(),
            mean: g.mean.iter().copied().collect(),
            cov: (0..d).map(|i| (0..d).map(|j| g.cov[(i, j)]).collect()).collect(),
        }
    }
}

impl GaussianMacrostate {
    /// Validates shape, symmetry and positive semidefiniteness. The
    /// resolution restriction is checked separately by [`rr_satisfied`].
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if d == 0 || !d.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("phase-space dimension {d} must be even and nonzero")));
        }
        if cov.nrows() != d || cov.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: cov.nrows() });
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite entry".into()));
        }
        let deviation = (&cov - cov.transpose()).amax();
        if deviation > TOL_ALG * cov.amax().max(1.0) {
            return Err(Error::NotSymmetric { deviation });
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        let min = min_eigenvalue(&cov);
        if min < -psd_tolerance(&cov) {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
        }
        Ok(Self { mean, cov })
    }

    /// Single- or multi-mode state with diagonal covariance
    /// diag(vx₁, vp₁, vx₂, vp₂, …) centred on `mean`.
    pub fn diagonal(mean: &[f64], variances: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(mean), DMatrix::from_diagonal(&DVector::from_column_slice(variances)))
    }

    /// The product of minimum-uncertainty states diag(λ, λ) centred at the origin.
    pub fn vacuum(n_modes: usize, lambda: RrScale) -> Self {
        let d = 2 * n_modes;
        Self { mean: DVector::zeros(d), cov: DMatrix::from_diagonal_element(d, d, lambda.value()) }
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn displaced(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: shift.len() });
        }
        Ok(Self { mean: &self.mean + DVector::from_column_slice(shift), cov: self.cov.clone() })
    }

    /// (mean, variance) of every phase-space coordinate.
    pub fn marginals(&self) -> Vec<(f64, f64)> {
        (0..self.dim()).map(|i| (self.mean[i], self.cov[(i, i)])).collect()
    }

    /// Probability density at `z`. Fails for singular covariance.
    pub fn density(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: z.len() });
        }
        let chol = Cholesky::new(self.cov.clone()).ok_or(Error::Singular)?;
        let det = chol.determinant();
        if det.is_nan() || det <= 0.0 {
            return Err(Error::Singular);
        }
        let dz = DVector::from_column_slice(z) - &self.mean;
        let quad = dz.dot(&chol.solve(&dz));
        let norm = (2.0 * std::f64::consts::PI).powi(self.dim() as i32) * det;
        Ok((-0.5 * quad).exp() / norm.sqrt())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DVector<f64>> {
        let chol = Cholesky::new(self.cov.clone()).ok_or(Error::Singular)?;
        let g = DVector::from_fn(self.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        Ok(&self.mean + chol.l() * g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RrCheck {
    pub satisfied: bool,
    /// Smallest eigenvalue of γ + iλΣ.
    pub margin: f64,
}

/// Tests γ + iλΣ ⪰ 0 through the smallest eigenvalue of that Hermitian matrix.
pub fn rr_satisfied(cov: &DMatrix<f64>, lambda: RrScale) -> Result<RrCheck> {
    let d = cov.nrows();
    if d == 0 || !d.is_multiple_of(2) || cov.ncols() != d {
        return Err(Error::DimensionMismatch { expected: 2 * (d / 2).max(1), found: d });
    }
    let deviation = (cov - cov.transpose()).amax();
    if deviation > TOL_ALG * cov.amax().max(1.0) {
        return Err(Error::NotSymmetric { deviation });
    }
    let sigma = symplectic_form(d / 2);
    let h = DMatrix::from_fn(d, d, |i, j| {
        Complex::new(0.5 * (cov[(i, j)] + cov[(j, i)]), lambda.value() * sigma[(i, j)])
    });
    let margin = h.symmetric_eigenvalues().min();
    Ok(RrCheck { satisfied: margin >= -psd_tolerance(cov), margin })
}

/// Symplectic eigenvalues ν₁ ≤ … ≤ ν_N of γ: the moduli of the eigenvalues
/// of iΣγ, computed from the Hermitian matrix γ^{1/2}(iΣ)γ^{1/2}. They are
/// invariant under symplectic evolution, and γ + iλΣ ⪰ 0 iff ν₁ ≥ λ.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let d = cov.nrows();
    if d == 0 || !d.is_multiple_of(2) || cov.ncols() != d {
        return Err(Error::DimensionMismatch { expected: 2 * (d / 2).max(1), found: d });
    }
    let eig = ((cov + cov.transpose()) * 0.5).symmetric_eigen();
    let root = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()));
    let sqrt_cov = &eig.eigenvectors * root * eig.eigenvectors.transpose();
    let sigma = symplectic_form(d / 2);
    let sqrt_c = sqrt_cov.map(|v| Complex::new(v, 0.0));
    let i_sigma = sigma.map(|v| Complex::new(0.0, v));
    let h = &sqrt_c * i_sigma * &sqrt_c;
    let h = (&h + h.adjoint()) * Complex::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let mut nu: Vec<f64> = ev[..d / 2].iter().map(|v| v.max(0.0)).collect();
    nu.sort_by(f64::total_cmp);
    Ok(nu)
}

/// √(Var x_k · Var p_k) for each mode k.
pub fn uncertainty_product(state: &GaussianMacrostate) -> Vec<f64> {
    (0..state.n_modes())
        .map(|k| (state.cov[(2 * k, 2 * k)] * state.cov[(2 * k + 1, 2 * k + 1)]).sqrt())
        .collect()
}

/// mean → Aᵀ mean, γ → Aᵀ γ A.
pub fn evolve(state: &GaussianMacrostate, a: &SymplecticMatrix) -> Result<GaussianMacrostate> {
    if a.n_modes() != state.n_modes() {
        return Err(Error::DimensionMismatch { expected: state.dim(), found: a.matrix().nrows() });
    }
    let at = a.matrix().transpose();
    let cov = &at * &state.cov * a.matrix();
    Ok(GaussianMacrostate { mean: &at * &state.mean, cov: (&cov + cov.transpose()) * 0.5 })
}

/// Classical fidelity ∫√(f g) of two Gaussians, in closed form.
pub fn fidelity(f: &GaussianMacrostate, g: &GaussianMacrostate) -> Result<f64> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), found: g.dim() });
    }
    let avg = (&f.cov + &g.cov) * 0.5;
    let chol = Cholesky::new(avg).ok_or(Error::Singular)?;
    let det_avg = chol.determinant();
    if det_avg.is_nan() || det_avg <= 0.0 {
        return Err(Error::Singular);
    }
    let dmu = &f.mean - &g.mean;
    let quad = dmu.dot(&chol.solve(&dmu));
    let det_f = f.cov.determinant().max(0.0);
    let det_g = g.cov.determinant().max(0.0);
    let value = (-quad / 8.0).exp() * (det_f * det_g).powf(0.25) / det_avg.sqrt();
    Ok(value.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoCloningWitness {
    pub fidelity: f64,
    pub fidelity_sq: f64,
    /// Cloning would require F² = F, which fails for any 0 < F < 1.
    pub cloning_impossible: bool,
}

pub fn no_cloning_witness(f: &GaussianMacrostate, g: &GaussianMacrostate) -> Result<NoCloningWitness> {
    let fid = fidelity(f, g)?;
    Ok(NoCloningWitness { fidelity: fid, fidelity_sq: fid * fid, cloning_impossible: fid > TOL_ALG && fid < 1.0 - TOL_ALG })
}

/// A random state satisfying the restriction: covariance Aᵀ diag(ν₁, ν₁, …) A
/// with ν_k ≥ λ and A a random symplectic map, mean uniform in [−2, 2).
pub fn random_rr_valid<R: Rng + ?Sized>(n_modes: usize, lambda: RrScale, rng: &mut R) -> GaussianMacrostate {
    let d = 2 * n_modes;
    let mut diag = DMatrix::zeros(d, d);
    for k in 0..n_modes {
        // A quarter of the modes sit exactly on the boundary.
        let v = if rng.gen_bool(0.25) { lambda.value() } else { lambda.value() * (1.0 + rng.gen_range(0.0..2.0f64)) };
        diag[(2 * k, 2 * k)] = v;
        diag[(2 * k + 1, 2 * k + 1)] = v;
    }
    let mean = DVector::from_fn(d, |_, _| rng.gen_range(-2.0..2.0));
    let base = GaussianMacrostate { mean, cov: diag };
    evolve(&base, &SymplecticMatrix::random(n_modes, rng)).expect("dimensions agree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn half() -> RrScale {
        RrScale::default()
    }

    #[test]
    fn rr_boundary_values() {
        let c = rr_satisfied(GaussianMacrostate::diagonal(&[0.0, 0.0], &[0.5, 0.5]).unwrap().cov(), half()).unwrap();
        assert!(c.satisfied);
        assert!(c.margin.abs() < 1e-12);
        let c = rr_satisfied(GaussianMacrostate::diagonal(&[0.0, 0.0], &[0.25, 0.25]).unwrap().cov(), half()).unwrap();
        assert!(!c.satisfied);
        assert!((c.margin + 0.25).abs() < 1e-12);
        let s = GaussianMacrostate::diagonal(&[0.0, 0.0], &[2.0, 0.125]).unwrap();
        assert!((uncertainty_product(&s)[0] - 0.5).abs() < 1e-15);
        assert!(rr_satisfied(s.cov(), half()).unwrap().satisfied);
    }

    #[test]
    fn symplectic_spectrum() {
        let s = GaussianMacrostate::diagonal(&[0.0; 4], &[2.0, 0.125, 3.0, 3.0]).unwrap();
        let nu = symplectic_eigenvalues(s.cov()).unwrap();
        assert!((nu[0] - 0.5).abs() < 1e-12 && (nu[1] - 3.0).abs() < 1e-12, "{nu:?}");
        let squeezed = evolve(&GaussianMacrostate::vacuum(1, half()), &SymplecticMatrix::squeeze(1, 0, 3.0).unwrap()).unwrap();
        assert!((squeezed.cov()[(0, 0)] - 4.5).abs() < 1e-12);
        assert!((squeezed.cov()[(1, 1)] - 0.5 / 9.0).abs() < 1e-12);
        assert!(rr_satisfied(squeezed.cov(), half()).unwrap().satisfied);
        // Rotations are orthogonal, so they keep the eigenvalue margin itself.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_rr_valid(1, half(), &mut rng);
        let r = evolve(&g, &SymplecticMatrix::rotation(1, 0, 0.7)).unwrap();
        let before = rr_satisfied(g.cov(), half()).unwrap().margin;
        assert!((rr_satisfied(r.cov(), half()).unwrap().margin - before).abs() < 1e-12);
        assert!((r.cov().determinant() - g.cov().determinant()).abs() < 1e-12);
        assert!(rr_satisfied(&(g.cov() * 0.0), RrScale(0.0)).unwrap().satisfied);
    }

    #[test]
    fn rejects_invalid_covariances() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(GaussianMacrostate::new(DVector::zeros(2), m), Err(Error::NotSymmetric { .. })));
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(GaussianMacrostate::new(DVector::zeros(2), m), Err(Error::NotPositiveSemidefinite { .. })));
        assert!(GaussianMacrostate::diagonal(&[0.0], &[1.0]).is_err());
        assert!(RrScale::new(-0.1).is_err());
    }

    #[test]
    fn fidelity_closed_form_values() {
        let a = GaussianMacrostate::vacuum(1, half());
        let b = a.displaced(&[1.0, 0.0]).unwrap();
        assert!((fidelity(&a, &b).unwrap() - (-0.25f64).exp()).abs() < 1e-12);
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        let w = no_cloning_witness(&a, &b).unwrap();
        assert!(w.cloning_impossible);
        assert!(!no_cloning_witness(&a, &a).unwrap().cloning_impossible);
        let far = a.displaced(&[100.0, 0.0]).unwrap();
        let w = no_cloning_witness(&a, &far).unwrap();
        assert!(w.fidelity < 1e-15 && !w.cloning_impossible);
    }

    #[test]
    fn density_at_mean() {
        let a = GaussianMacrostate::vacuum(1, half());
        assert!((a.density(&[0.0, 0.0]).unwrap() - 1.0 / std::f64::consts::PI).abs() < 1e-14);
        let point = GaussianMacrostate::diagonal(&[0.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!(matches!(point.density(&[0.0, 0.0]), Err(Error::Singular)));
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_rr_valid(2, half(), &mut rng);
        let text = serde_json::to_string(&g).unwrap();
        assert!(text.contains("\"n_modes\":2"));
        let back: GaussianMacrostate = serde_json::from_str(&text).unwrap();
        assert!((back.cov() - g.cov()).amax() < 1e-12);
        assert!(serde_json::from_str::<GaussianMacrostate>(r#"{"n_modes":1,"mean":[0,0],"cov":[[1,2],[2,1]]}"#).is_err());
    }

    #[test]
    fn sampling_matches_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = random_rr_valid(1, half(), &mut rng);
        let n = 200_000;
        let mut sum = DVector::zeros(2);
        let mut sq = DMatrix::zeros(2, 2);
        for _ in 0..n {
            let z = g.sample(&mut rng).unwrap() - g.mean();
            sum += &z;
            sq += &z * z.transpose();
        }
        let cov = sq / n as f64;
        let rel = (&cov - g.cov()).amax() / g.cov().amax();
        assert!(rel < 0.02, "{rel}");
        assert!((sum / n as f64).amax() < 0.05 * g.cov().amax().sqrt());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn evolution_preserves_restriction(seed in any::<u64>(), n in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_rr_valid(n, half(), &mut rng);
            let before = rr_satisfied(g.cov(), half()).unwrap();
            prop_assert!(before.satisfied);
            let a = SymplecticMatrix::random(n, &mut rng);
            let after = evolve(&g, &a).unwrap();
            prop_assert!(rr_satisfied(after.cov(), half()).unwrap().satisfied);
            let nu0 = symplectic_eigenvalues(g.cov()).unwrap();
            let nu1 = symplectic_eigenvalues(after.cov()).unwrap();
            for (x, y) in nu0.iter().zip(&nu1) {
                prop_assert!((x - y).abs() < 1e-9);
                prop_assert!(*x >= 0.5 - 1e-9);
            }
            for p in uncertainty_product(&after) {
                prop_assert!(p >= 0.5 - 1e-9);
            }
        }

        #[test]
        fn fidelity_is_symplectic_invariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = random_rr_valid(2, half(), &mut rng);
            let g = random_rr_valid(2, half(), &mut rng);
            let a = SymplecticMatrix::random(2, &mut rng);
            let before = fidelity(&f, &g).unwrap();
            let after = fidelity(&evolve(&f, &a).unwrap(), &evolve(&g, &a).unwrap()).unwrap();
            prop_assert!((before - after).abs() < 1e-9);
            prop_assert!((before - fidelity(&g, &f).unwrap()).abs() < 1e-12);
        }
    }
}
