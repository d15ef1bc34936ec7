//! Linear symplectic maps: the reversible dynamics that preserve the
//! resolution restriction.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::TOL_ALG;

/// Σ = ⊕ [[0, −1], [1, 0]] over `n_modes` modes, in (x₁, p₁, x₂, p₂, …) order.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        s[(2 * k, 2 * k + 1)] = -1.0;
        s[(2 * k + 1, 2 * k)] = 1.0;
    }
    s
}

/// A matrix A with AᵀΣA = Σ.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    matrix: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || !n.is_multiple_of(2) || matrix.ncols() != n {
            return Err(Error::InvalidParameter(format!(
                "symplectic matrix must be 2N×2N, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let sigma = symplectic_form(n / 2);
        let deviation = (matrix.transpose() * &sigma * &matrix - &sigma).amax();
        // Entries of AᵀΣA scale with |A|², so the check is relative to that.
        let scale = matrix.amax().powi(2).max(1.0);
        if deviation > TOL_ALG * scale {
            return Err(Error::NotSymplectic { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self { matrix: DMatrix::identity(2 * n_modes, 2 * n_modes) }
    }

    /// Phase-space rotation of one mode by `angle`.
    pub fn rotation(n_modes: usize, mode: usize, angle: f64) -> Self {
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        let (s, c) = angle.sin_cos();
        let i = 2 * mode;
        m[(i, i)] = c;
        m[(i, i + 1)] = s;
        m[(i + 1, i)] = -s;
        m[(i + 1, i + 1)] = c;
        Self { matrix: m }
    }

    /// x → s·x, p → p/s on one mode.
    pub fn squeeze(n_modes: usize, mode: usize, s: f64) -> Result<Self> {
        if s.is_nan() || s <= 0.0 {
            return Err(Error::InvalidParameter(format!("squeeze factor {s} must be positive")));
        }
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        m[(2 * mode, 2 * mode)] = s;
        m[(2 * mode + 1, 2 * mode + 1)] = 1.0 / s;
        Ok(Self { matrix: m })
    }

    /// Mixes modes a and b: both x and p rotate by `angle` in the (a, b) plane.
    pub fn beamsplitter(n_modes: usize, a: usize, b: usize, angle: f64) -> Self {
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        let (s, c) = angle.sin_cos();
        for q in 0..2 {
            let (i, j) = (2 * a + q, 2 * b + q);
            m[(i, i)] = c;
            m[(i, j)] = s;
            m[(j, i)] = -s;
            m[(j, j)] = c;
        }
        Self { matrix: m }
    }

    /// self, then other: z → (AB)ᵀ z.
    pub fn then(&self, other: &SymplecticMatrix) -> Self {
        Self { matrix: &self.matrix * &other.matrix }
    }

    /// Random composition of rotations, moderate squeezers and beamsplitters.
    pub fn random<R: Rng + ?Sized>(n_modes: usize, rng: &mut R) -> Self {
        let mut a = Self::identity(n_modes);
        for _ in 0..(3 * n_modes + 2) {
            let mode = rng.gen_range(0..n_modes);
            let step = match rng.gen_range(0..3) {
                0 => Self::rotation(n_modes, mode, rng.gen_range(0.0..std::f64::consts::TAU)),
                1 => Self::squeeze(n_modes, mode, rng.gen_range(-1.0f64..1.0).exp()).expect("positive"),
                _ if n_modes > 1 => {
                    let other = (mode + rng.gen_range(1..n_modes)) % n_modes;
                    Self::beamsplitter(n_modes, mode, other, rng.gen_range(0.0..std::f64::consts::TAU))
                }
                _ => Self::rotation(n_modes, mode, rng.gen_range(0.0..std::f64::consts::TAU)),
            };
            a = a.then(&step);
        }
        a
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=3 {
            for _ in 0..20 {
                let a = SymplecticMatrix::random(n, &mut rng);
                assert!(SymplecticMatrix::new(a.matrix().clone()).is_ok());
            }
        }
        assert!(SymplecticMatrix::new(DMatrix::from_diagonal_element(2, 2, 2.0)).is_err());
        assert!(SymplecticMatrix::squeeze(1, 0, -1.0).is_err());
    }
}
