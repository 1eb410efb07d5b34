use num_complex::Complex64;

use super::layout::RegisterLayout;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::numerics::{eigh, CMatrix, HermitianMatrix};

/// Tolerance on Hermiticity, unit trace and eigenvalue positivity.
pub const DENSITY_TOLERANCE: f64 = 1e-10;

/// Positive semidefinite unit-trace operator over a power-of-two dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let dim = entries.nrows();
        if !entries.is_square() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected a square power-of-two matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let asymmetry = (&entries - entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asymmetry > DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian (deviation {asymmetry:.3e})")));
        }
        let trace: Complex64 = entries.diagonal().iter().sum();
        if (trace.re - 1.0).abs() > DENSITY_TOLERANCE || trace.im.abs() > DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace is {trace}")));
        }
        let hermitian = HermitianMatrix::new(entries)?;
        let min_eigenvalue = eigh(&hermitian).min_eigenvalue();
        if min_eigenvalue < -DENSITY_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {min_eigenvalue:.3e}")));
        }
        Ok(Self { entries: hermitian.into_matrix() })
    }

    /// `|psi><psi|`.
    pub fn from_pure(state: &StateVector) -> Self {
        let psi = crate::numerics::CVector::from_column_slice(state.amplitudes());
        Self { entries: &psi * psi.adjoint() }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// Leading `dim x dim` block, i.e. the operator without its zero padding.
    pub fn cropped(&self, dim: usize) -> CMatrix {
        self.entries.view((0, 0), (dim, dim)).into_owned()
    }

    pub fn to_hermitian(&self) -> HermitianMatrix {
        HermitianMatrix::new(self.entries.clone()).expect("density matrices are Hermitian")
    }
}

/// Reduced density matrix on register `keep`, tracing out every other register.
pub fn partial_trace(rho: &DensityMatrix, layout: &RegisterLayout, keep: &str) -> Result<DensityMatrix> {
    if layout.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: layout.dim() });
    }
    let span = layout.span(keep)?;
    let kept = span.dim();
    let mut reduced = CMatrix::zeros(kept, kept);
    for rest in 0..(rho.dim() >> span.width) {
        let base = span.base_index(rest);
        for a in 0..kept {
            for b in 0..kept {
                reduced[(a, b)] += rho.entries[(base + (a << span.shift), base + (b << span.shift))];
            }
        }
    }
    Ok(DensityMatrix { entries: reduced })
}

impl StateVector {
    /// Reduced density matrix of register `keep` without forming `|psi><psi|`.
    pub fn partial_trace(&self, layout: &RegisterLayout, keep: &str) -> Result<DensityMatrix> {
        if layout.total_qubits() != self.num_qubits() {
            return Err(Error::DimensionMismatch { expected: self.num_qubits(), found: layout.total_qubits() });
        }
        let span = layout.span(keep)?;
        let kept = span.dim();
        let mut reduced = CMatrix::zeros(kept, kept);
        for rest in 0..(self.dim() >> span.width) {
            let base = span.base_index(rest);
            let block: Vec<Complex64> = (0..kept).map(|v| self.amplitude(base + (v << span.shift))).collect();
            for a in 0..kept {
                for b in 0..kept {
                    reduced[(a, b)] += block[a] * block[b].conj();
                }
            }
        }
        Ok(DensityMatrix { entries: reduced })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::state::normalize_real;
    use crate::testutil::random_state;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn product_state_reduces_to_projector() {
        let layout = RegisterLayout::new(vec![("first", 1), ("second", 1)]).unwrap();
        let psi = StateVector::basis(1, 0).unwrap().tensor(&normalize_real(&[1.0, 1.0]).unwrap());
        let rho = psi.partial_trace(&layout, "first").unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert!((rho.entries() - expected).norm() < 1e-15);
    }

    #[test]
    fn bell_state_is_maximally_mixed() {
        let layout = RegisterLayout::new(vec![("a", 1), ("b", 1)]).unwrap();
        let bell = normalize_real(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        let half = CMatrix::identity(2, 2).scale(0.5);
        for keep in ["a", "b"] {
            assert!((bell.partial_trace(&layout, keep).unwrap().entries() - &half).norm() < 1e-15);
            let via_density = partial_trace(&DensityMatrix::from_pure(&bell), &layout, keep).unwrap();
            assert!((via_density.entries() - &half).norm() < 1e-15);
        }
        assert!(matches!(bell.partial_trace(&layout, "z"), Err(Error::UnknownRegister(_))));
    }

    #[test]
    fn reduced_states_are_valid_densities() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let q = rng.random_range(2..=8);
            let split = rng.random_range(1..q);
            let layout = RegisterLayout::new(vec![("a", split), ("b", q - split)]).unwrap();
            let psi = random_state(q, &mut rng);
            let keep = if rng.random_bool(0.5) { "a" } else { "b" };
            let rho = psi.partial_trace(&layout, keep).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-10);
            assert!(eigh(&rho.to_hermitian()).min_eigenvalue() >= -1e-10);
            DensityMatrix::new(rho.entries().clone()).unwrap();
        }
    }

    #[test]
    fn tensor_then_trace_recovers_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..20 {
            let a = random_state(2, &mut rng);
            let b = random_state(3, &mut rng);
            let layout = RegisterLayout::new(vec![("a", 2), ("b", 3)]).unwrap();
            let rho = a.tensor(&b).partial_trace(&layout, "a").unwrap();
            assert!((rho.entries() - DensityMatrix::from_pure(&a).entries()).norm() < 1e-10);
        }
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        assert!(DensityMatrix::new(CMatrix::identity(2, 2)).is_err());
        let negative = CMatrix::from_row_slice(2, 2, &[c(1.5), c(0.0), c(0.0), c(-0.5)]);
        assert!(DensityMatrix::new(negative).is_err());
        assert!(DensityMatrix::new(CMatrix::identity(3, 3).scale(1.0 / 3.0)).is_err());
    }
}
