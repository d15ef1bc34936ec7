//! The Kochen–Specker model of a qubit. Ontic states are points λ on the
//! unit sphere. Preparing the state with Bloch vector 𝚿 samples λ with density
//! (1/π) Θ(λ·𝚿) λ·𝚿, and a measurement of 𝚽 answers "yes" iff λ·𝚽 ≥ 0.
//! Averaging the response over the density gives (1 + 𝚽·𝚿)/2.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::{FiniteOntologicalModel, QuantumAssignment};
use crate::error::{Error, Result};
use crate::hilbert::BlochVector;
use crate::TOL_ALG;

/// An ontic state: a point on S².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint([f64; 3]);

impl SpherePoint {
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TOL_ALG {
            return Err(Error::NotUnitVector { norm });
        }
        Ok(Self(v))
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, v: &BlochVector) -> f64 {
        let w = v.components();
        self.0[0] * w[0] + self.0[1] * w[1] + self.0[2] * w[2]
    }
}

impl From<BlochVector> for SpherePoint {
    fn from(v: BlochVector) -> Self {
        Self(v.components())
    }
}

/// Heaviside step with Θ(0) = 1.
fn step(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// p(λ|Ψ) = (1/π) Θ(λ·𝚿) λ·𝚿.
pub fn ks_density(lambda: &SpherePoint, psi: &BlochVector) -> f64 {
    let d = lambda.dot(psi);
    step(d) * d / PI
}

/// p(Φ|λ) = Θ(λ·𝚽). Points with λ·𝚽 = 0 answer "yes".
pub fn ks_response(phi: &BlochVector, lambda: &SpherePoint) -> u8 {
    step(lambda.dot(phi)) as u8
}

/// Grid size (n_θ × n_φ) of the midpoint product rule on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Resolution {
    pub const MIN: Resolution = Resolution { n_theta: 16, n_phi: 32 };

    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < Self::MIN.n_theta || n_phi < Self::MIN.n_phi {
            return Err(Error::InvalidParameter(format!(
                "resolution {n_theta}x{n_phi} below minimum {}x{}",
                Self::MIN.n_theta,
                Self::MIN.n_phi
            )));
        }
        Ok(Self { n_theta, n_phi })
    }

    pub fn cells(&self) -> usize {
        self.n_theta * self.n_phi
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Self { n_theta: 400, n_phi: 800 }
    }
}

impl FromStr for Resolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("resolution `{s}` is not of the form NTHETAxNPHI"));
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let n_theta = a.trim().parse().map_err(|_| bad())?;
        let n_phi = b.trim().parse().map_err(|_| bad())?;
        Self::new(n_theta, n_phi)
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_theta, self.n_phi)
    }
}

/// Midpoint product rule on (θ, φ) ∈ [0, π] × [0, 2π) with sin θ weights.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    resolution: Resolution,
    points: Vec<SpherePoint>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn new(resolution: Resolution) -> Result<Self> {
        let Resolution { n_theta, n_phi } = Resolution::new(resolution.n_theta, resolution.n_phi)?;
        let d_theta = PI / n_theta as f64;
        let d_phi = 2.0 * PI / n_phi as f64;
        let mut points = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for i in 0..n_theta {
            let theta = (i as f64 + 0.5) * d_theta;
            let w = theta.sin() * d_theta * d_phi;
            for j in 0..n_phi {
                let phi = (j as f64 + 0.5) * d_phi;
                points.push(SpherePoint::from_angles(theta, phi));
                weights.push(w);
            }
        }
        Ok(Self { resolution, points, weights })
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Σ_i w_i f(λ_i), summed in cell-index order.
    pub fn integrate<F: Fn(&SpherePoint) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    pub fn ks_predicted(&self, phi: &BlochVector, psi: &BlochVector) -> f64 {
        self.integrate(|l| f64::from(ks_response(phi, l)) * ks_density(l, psi))
    }

    pub fn ks_overlap(&self, psi1: &BlochVector, psi2: &BlochVector) -> f64 {
        self.integrate(|l| ks_density(l, psi1).min(ks_density(l, psi2)))
    }
}

/// Probability of the 𝚽 outcome for preparation 𝚿, by quadrature.
pub fn ks_predicted(phi: &BlochVector, psi: &BlochVector, resolution: Resolution) -> Result<f64> {
    Ok(SphereQuadrature::new(resolution)?.ks_predicted(phi, psi))
}

/// ∫ min(p(λ|Ψ₁), p(λ|Ψ₂)) dλ.
pub fn ks_overlap(psi1: &BlochVector, psi2: &BlochVector, resolution: Resolution) -> Result<f64> {
    Ok(SphereQuadrature::new(resolution)?.ks_overlap(psi1, psi2))
}

/// Draws λ from p(λ|Ψ). In polar coordinates about 𝚿 the density of
/// u = cos θ is 2u on [0, 1], so u = √U; the azimuth is uniform.
pub fn sample_ks<R: Rng + ?Sized>(psi: &BlochVector, rng: &mut R) -> SpherePoint {
    let u = rng.gen::<f64>().sqrt();
    let azimuth = rng.gen::<f64>() * 2.0 * PI;
    let s = (1.0 - u * u).max(0.0).sqrt();
    let [e1, e2] = orthonormal_frame(psi);
    let n = psi.components();
    let mut v = [0.0; 3];
    for i in 0..3 {
        v[i] = u * n[i] + s * (azimuth.cos() * e1[i] + azimuth.sin() * e2[i]);
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    SpherePoint(v.map(|x| x / norm))
}

fn orthonormal_frame(n: &BlochVector) -> [[f64; 3]; 2] {
    let n = n.components();
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let d = helper[0] * n[0] + helper[1] * n[1] + helper[2] * n[2];
    let mut e1 = [helper[0] - d * n[0], helper[1] - d * n[1], helper[2] - d * n[2]];
    let norm = e1.iter().map(|x| x * x).sum::<f64>().sqrt();
    e1 = e1.map(|x| x / norm);
    let e2 = [n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2], n[0] * e1[1] - n[1] * e1[0]];
    [e1, e2]
}

/// Finite approximation of the Kochen–Specker model on the quadrature grid.
/// Each qubit state in `qa` becomes a preparation (quadrature weights times
/// density, renormalized) and each two-outcome basis a deterministic
/// response table.
pub fn discretize_ks(qa: &QuantumAssignment, resolution: Resolution) -> Result<FiniteOntologicalModel> {
    let grid = SphereQuadrature::new(resolution)?;
    let mut preparations = BTreeMap::new();
    for (label, psi) in &qa.states {
        let bloch = BlochVector::from_state(psi)?;
        let mut p: Vec<f64> = grid.points.iter().zip(&grid.weights).map(|(l, w)| w * ks_density(l, &bloch)).collect();
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        preparations.insert(label.clone(), p);
    }
    let mut responses = BTreeMap::new();
    for (label, basis) in &qa.bases {
        if basis.dim() != 2 {
            return Err(Error::NotQubit { dim: basis.dim() });
        }
        let phi = BlochVector::from_state(basis.vector(0))?;
        let table = grid
            .points
            .iter()
            .map(|l| if ks_response(&phi, l) == 1 { vec![1.0, 0.0] } else { vec![0.0, 1.0] })
            .collect();
        responses.insert(label.clone(), table);
    }
    FiniteOntologicalModel::new(resolution.cells(), preparations, responses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{qubit, MeasurementBasis};
    use crate::ontology::reproduces_quantum;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(v: [f64; 3]) -> BlochVector {
        BlochVector::new(v).unwrap()
    }

    #[test]
    fn density_values() {
        let psi = BlochVector::from_angles(0.4, 1.1);
        assert!((ks_density(&psi.into(), &psi) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(ks_density(&psi.antipode().into(), &psi), 0.0);
    }

    #[test]
    fn density_integrates_to_one() {
        let grid = SphereQuadrature::new(Resolution::new(400, 800).unwrap()).unwrap();
        for psi in [e([0.0, 0.0, 1.0]), BlochVector::from_angles(1.0, 2.0)] {
            let total = grid.integrate(|l| ks_density(l, &psi));
            assert!((total - 1.0).abs() < 1e-4, "{total}");
        }
    }

    #[test]
    fn response_and_tie_rule() {
        let phi = e([0.0, 0.0, 1.0]);
        assert_eq!(ks_response(&phi, &SpherePoint::new([0.0, 0.0, 1.0]).unwrap()), 1);
        assert_eq!(ks_response(&phi, &SpherePoint::new([0.0, 0.0, -1.0]).unwrap()), 0);
        assert_eq!(ks_response(&phi, &SpherePoint::new([1.0, 0.0, 0.0]).unwrap()), 1);
    }

    #[test]
    fn predicted_matches_born_at_landmarks() {
        let res = Resolution::default();
        let z = e([0.0, 0.0, 1.0]);
        let x = e([1.0, 0.0, 0.0]);
        assert!((ks_predicted(&z, &z, res).unwrap() - 1.0).abs() < 1e-3);
        assert!((ks_predicted(&x, &z, res).unwrap() - 0.5).abs() < 1e-3);
        assert!((ks_predicted(&z.antipode(), &z, res).unwrap()).abs() < 1e-3);
    }

    #[test]
    fn resolution_parsing_and_minimum() {
        assert_eq!("400x800".parse::<Resolution>().unwrap(), Resolution::default());
        assert!("8x16".parse::<Resolution>().is_err());
        assert!("400*800".parse::<Resolution>().is_err());
        assert!(ks_predicted(&e([0.0, 0.0, 1.0]), &e([0.0, 0.0, 1.0]), Resolution { n_theta: 8, n_phi: 8 }).is_err());
    }

    #[test]
    fn overlap_extremes() {
        let res = Resolution::default();
        let z = e([0.0, 0.0, 1.0]);
        assert!(ks_overlap(&z, &z.antipode(), res).unwrap() < 1e-12);
        assert!((ks_overlap(&z, &z, res).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn samples_have_the_analytic_mean() {
        let psi = BlochVector::from_angles(2.2, -0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..n {
            let l = sample_ks(&psi, &mut rng);
            let d = l.dot(&psi);
            assert!(d >= 0.0);
            sum += d;
            sum_sq += d * d;
        }
        let mean = sum / n as f64;
        // E[u] = 2/3, E[u²] = 1/2 under density 2u.
        let sigma = ((0.5 - 4.0 / 9.0) / n as f64).sqrt();
        assert!((mean - 2.0 / 3.0).abs() < 3.0 * sigma, "{mean}");
        assert!((sum_sq / n as f64 - 0.5).abs() < 0.005);
    }

    #[test]
    fn discretized_model_reproduces_qubit() {
        let qa = QuantumAssignment::new()
            .with_state("zero", qubit::zero())
            .with_state("plus", qubit::plus())
            .with_state("tilted", qubit::real(0.37))
            .with_basis("Z", MeasurementBasis::computational(2).unwrap())
            .with_basis("X", MeasurementBasis::new(vec![qubit::plus(), qubit::minus()]).unwrap());
        let coarse = reproduces_quantum(&discretize_ks(&qa, Resolution::new(50, 100).unwrap()).unwrap(), &qa, 1e-3)
            .unwrap();
        let fine = reproduces_quantum(&discretize_ks(&qa, Resolution::default()).unwrap(), &qa, 1e-3).unwrap();
        assert!(fine.passes(), "{fine:?}");
        assert!(fine.max_deviation < coarse.max_deviation);
    }
}
