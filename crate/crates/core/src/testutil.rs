//! Random instance generators shared by unit tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::{CMatrix, CVector, HermitianMatrix};
use crate::quantum::StateVector;

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_cmatrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| Complex64::new(gaussian(rng), gaussian(rng)))
}

pub fn random_cvector(dim: usize, rng: &mut impl Rng) -> CVector {
    CVector::from_fn(dim, |_, _| Complex64::new(gaussian(rng), gaussian(rng)))
}

pub fn random_real(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let m = random_cmatrix(dim, dim, rng);
    HermitianMatrix::new((&m + m.adjoint()).scale(0.5)).unwrap()
}

/// `G G^dagger + 0.1 I`, comfortably positive definite.
pub fn random_pd(dim: usize, rng: &mut impl Rng) -> HermitianMatrix {
    let g = random_cmatrix(dim, dim, rng);
    HermitianMatrix::new(&g * g.adjoint() + CMatrix::identity(dim, dim).scale(0.1)).unwrap()
}

pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    random_cmatrix(dim, dim, rng).qr().q()
}

pub fn random_state(num_qubits: usize, rng: &mut impl Rng) -> StateVector {
    let v = random_cvector(1 << num_qubits, rng);
    crate::quantum::normalize_to_state(v.as_slice()).unwrap()
}
