//! Dense real and complex linear algebra used throughout the crate.
//!
//! Matrices are `nalgebra` dense matrices; the newtypes here carry the
//! validation the rest of the crate relies on (finite entries, Hermitian
//! symmetry) so that downstream code never re-checks it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest tolerated `|H - H^dagger|` entry before a matrix is rejected.
pub const HERMITIAN_TOLERANCE: f64 = 1e-9;
/// Smallest eigenvalue still treated as invertible.
pub const DEFINITE_THRESHOLD: f64 = 1e-12;
/// Smallest eigenvalue accepted by [`condition_number`].
pub const CONDITION_THRESHOLD: f64 = 1e-14;

/// Row-major real matrix with at least one row and column and finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix(DMatrix<f64>);

impl RealMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::InvalidMatrix("matrix must have at least one row and column".into()));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("matrix entries must be finite".into()));
        }
        Ok(Self(matrix))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch { expected: ncols, found: bad.len() });
        }
        Self::new(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.0.row(i).iter().copied().collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.nrows()).map(|i| self.row(i)).collect()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }
}

/// Complex Hermitian matrix. Construction symmetrizes `(H + H^dagger)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidMatrix(format!(
                "Hermitian matrix must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("matrix entries must be finite".into()));
        }
        let adjoint = matrix.adjoint();
        let deviation = (&matrix - &adjoint).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if deviation > HERMITIAN_TOLERANCE {
            return Err(Error::NonHermitianInput { deviation });
        }
        Ok(Self((matrix + adjoint).unscale(2.0)))
    }

    pub fn from_real(matrix: &DMatrix<f64>) -> Result<Self> {
        Self::new(matrix.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn from_diagonal(diagonal: &[f64]) -> Self {
        let d = DVector::from_iterator(diagonal.len(), diagonal.iter().map(|&v| Complex64::new(v, 0.0)));
        Self(CMatrix::from_diagonal(&d))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.scale(factor))
    }

    /// `alpha * self + beta * other`; dimensions must agree.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(Self(self.0.scale(alpha) + other.0.scale(beta)))
    }

    /// Leading `dim x dim` block.
    pub fn leading_block(&self, dim: usize) -> Result<Self> {
        if dim == 0 || dim > self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: dim });
        }
        Ok(Self(self.0.view((0, 0), (dim, dim)).into_owned()))
    }
}

/// `H = V diag(lambda) V^dagger` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> CMatrix {
        self.apply_spectral(|l| Complex64::new(l, 0.0))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `V f(diag(lambda)) V^dagger`.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            let factor = f(lambda);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= factor;
            }
        }
        scaled * v.adjoint()
    }

    /// `e^{-i H t}`.
    pub fn exp_unitary(&self, t: f64) -> CMatrix {
        self.apply_spectral(|lambda| Complex64::from_polar(1.0, -lambda * t))
    }
}

/// Hermitian eigendecomposition, eigenvalues ascending.
///
/// Each eigenvector is rotated so that its first component with modulus above
/// `1e-12` is real and positive.
pub fn eigh(h: &HermitianMatrix) -> EigenDecomposition {
    let dim = h.dim();
    let eig = h.as_matrix().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = DVector::from_iterator(dim, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = CMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        let norm = col.norm();
        if norm > 0.0 {
            col.unscale_mut(norm);
        }
        if let Some(pivot) = col.iter().find(|z| z.norm() > 1e-12).copied() {
            let phase = pivot.conj() / pivot.norm();
            col *= phase;
        }
        eigenvectors.set_column(dst, &col);
    }
    EigenDecomposition { eigenvalues, eigenvectors }
}

/// `e^{-i H t}` computed through the eigendecomposition.
pub fn matrix_exp_unitary(h: &HermitianMatrix, t: f64) -> CMatrix {
    eigh(h).exp_unitary(t)
}

/// Solves `(H + ridge I) x = b`.
pub fn solve_hermitian(h: &HermitianMatrix, b: &CVector, ridge: f64) -> Result<CVector> {
    if b.len() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: b.len() });
    }
    if !(ridge >= 0.0) || !ridge.is_finite() {
        return Err(Error::InvalidConfig(format!("ridge must be a finite nonnegative number, got {ridge}")));
    }
    let eig = eigh(h);
    let min_eigenvalue = eig.min_eigenvalue() + ridge;
    if min_eigenvalue <= DEFINITE_THRESHOLD {
        return Err(Error::SingularSystem { min_eigenvalue });
    }
    let v = &eig.eigenvectors;
    let mut coefficients = v.adjoint() * b;
    for (c, &lambda) in coefficients.iter_mut().zip(eig.eigenvalues.iter()) {
        *c /= lambda + ridge;
    }
    Ok(v * coefficients)
}

/// Real symmetric convenience wrapper around [`solve_hermitian`].
pub fn solve_symmetric(m: &DMatrix<f64>, b: &DVector<f64>, ridge: f64) -> Result<DVector<f64>> {
    let h = HermitianMatrix::from_real(m)?;
    let rhs = b.map(|v| Complex64::new(v, 0.0));
    Ok(solve_hermitian(&h, &rhs, ridge)?.map(|z| z.re))
}

/// `lambda_max / lambda_min` of a positive definite matrix.
pub fn condition_number(h: &HermitianMatrix) -> Result<f64> {
    let eig = eigh(h);
    let min_eigenvalue = eig.min_eigenvalue();
    if min_eigenvalue <= CONDITION_THRESHOLD {
        return Err(Error::SingularSystem { min_eigenvalue });
    }
    Ok(eig.max_eigenvalue() / min_eigenvalue)
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Largest entry of `|U^dagger U - I|`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let product = u.adjoint() * u;
    product
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let (i, j) = (k % u.nrows(), k / u.nrows());
            let target = if i == j { 1.0 } else { 0.0 };
            (z - Complex64::new(target, 0.0)).norm()
        })
        .fold(0.0, f64::max)
}

pub fn to_complex(v: &[f64]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&x| Complex64::new(x, 0.0)))
}
