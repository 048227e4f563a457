//! Small dense helpers: Hermitian eigendecomposition and exponentials.

use crate::algebra::{hermitian_defect, max_abs, CMat};
use crate::error::{KrylovError, Result};
use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CVec = DVector<Complex64>;

#[derive(Debug, Clone)]
pub struct Spectral {
    pub values: DVector<f64>,
    pub vectors: CMat,
}

pub fn check_hermitian(h: &CMat) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(KrylovError::Domain("matrix is not square".into()));
    }
    let scale = max_abs(h).max(1.0);
    let d = hermitian_defect(h);
    if d > 1e-10 * scale {
        return Err(KrylovError::NotHermitian(d));
    }
    Ok(())
}

pub fn spectral(h: &CMat) -> Result<Spectral> {
    check_hermitian(h)?;
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    Ok(Spectral {
        values: eig.eigenvalues,
        vectors: eig.eigenvectors,
    })
}

impl Spectral {
    /// exp(-i H t)
    pub fn propagator(&self, t: f64) -> CMat {
        let n = self.values.len();
        let phases = DVector::from_iterator(
            n,
            self.values
                .iter()
                .map(|&l| Complex64::new(0.0, -l * t).exp()),
        );
        let scaled = CMat::from_fn(n, n, |r, c| self.vectors[(r, c)] * phases[c]);
        scaled * self.vectors.adjoint()
    }

    /// exp(-i H t) psi without forming the full propagator.
    pub fn evolve(&self, psi: &CVec, t: f64) -> CVec {
        let coeffs = self.vectors.adjoint() * psi;
        let rotated = CVec::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(self.values.iter())
                .map(|(c, &l)| c * Complex64::new(0.0, -l * t).exp()),
        );
        &self.vectors * rotated
    }
}

pub fn unitarity_defect(u: &CMat) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - CMat::identity(n, n)))
}

/// Frobenius norm, used as a cheap bound on the spectral norm.
pub fn frob(h: &CMat) -> f64 {
    h.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
