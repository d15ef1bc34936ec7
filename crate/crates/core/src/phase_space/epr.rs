//! A two-particle state peaked on x₂ − x₁ = c and p₁ + p₂ = 0, the classical
//! analogue of the EPR state.

use nalgebra::{DMatrix, DVector};

use super::GaussianMacrostate;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Particle {
    First,
    Second,
}

impl Particle {
    fn index(self) -> usize {
        match self {
            Particle::First => 0,
            Particle::Second => 1,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Particle::First => Particle::Second,
            Particle::Second => Particle::First,
        }
    }
}

/// Relative coordinate u = (x₁ − x₂)/√2 squeezed to variance s²/2, its
/// conjugate antisqueezed; total momentum v squeezed the same way. Mixing
/// the two modes back gives a state that saturates the restriction at λ = ½,
/// with ⟨x₁⟩ = 0 and ⟨x₂⟩ = c.
pub fn epr_state(c: f64, s: f64) -> Result<GaussianMacrostate> {
    if s.is_nan() || s <= 0.0 || !s.is_finite() || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("need finite c and s > 0, got c = {c}, s = {s}")));
    }
    let (lo, hi) = (s * s / 2.0, 1.0 / (2.0 * s * s));
    // (u, p_u, v, p_v) with u, p_u antisymmetric and v, p_v symmetric combinations.
    let w = DMatrix::from_diagonal(&DVector::from_vec(vec![lo, hi, hi, lo]));
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // z = T w: x₁ = (u + v)/√2, x₂ = (v − u)/√2, same for momenta.
    #[rustfmt::skip]
    let t = DMatrix::from_row_slice(4, 4, &[
         r, 0.0,   r, 0.0,
       0.0,   r, 0.0,   r,
        -r, 0.0,   r, 0.0,
       0.0,  -r, 0.0,   r,
    ]);
    let cov = &t * w * t.transpose();
    let cov = (&cov + cov.transpose()) * 0.5;
    GaussianMacrostate::new(DVector::from_vec(vec![0.0, 0.0, c, 0.0]), cov)
}

/// Conditions a two-mode state on a sharp position reading `x` of one
/// particle and returns the Gaussian state of the other.
pub fn condition_on_position(state: &GaussianMacrostate, measured: Particle, x: f64) -> Result<GaussianMacrostate> {
    if state.n_modes() != 2 {
        return Err(Error::DimensionMismatch { expected: 4, found: state.dim() });
    }
    let k = 2 * measured.index();
    let rest = 2 * measured.other().index();
    let g = state.cov();
    let vk = g[(k, k)];
    if vk.is_nan() || vk <= 0.0 {
        return Err(Error::Singular);
    }
    let mu = state.mean();
    let shift = x - mu[k];
    let mean = DVector::from_fn(2, |i, _| mu[rest + i] + g[(rest + i, k)] / vk * shift);
    let cov = DMatrix::from_fn(2, 2, |i, j| g[(rest + i, rest + j)] - g[(rest + i, k)] * g[(k, rest + j)] / vk);
    GaussianMacrostate::new(mean, (&cov + cov.transpose()) * 0.5)
}
