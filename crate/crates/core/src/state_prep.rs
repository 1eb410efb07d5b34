//! Input-state preparation from row oracles.
//!
//! `build_chi` loads `|chi> = (1/||M||_F) sum_i ||M_i|| |M_i>|i>` by direct
//! amplitude loading in place of quantum RAM. A Walsh-Hadamard transform on
//! the index register followed by postselecting index outcome `0` leaves the
//! data register in `|M^T e>`. Only outcome `0` produces the unsigned row sum,
//! so the success probability is `||M^T e||^2 / (2^k ||M||_F^2)` rather than a
//! fixed one half.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::RealMatrix;
use crate::quantum::{postselect, qubits_for_dim, DensityMatrix, RegisterLayout, StateVector, ZERO_NORM};
use crate::rng;

pub const DATA: &str = "data";
pub const INDEX: &str = "index";

/// `|chi>` with its `(data, index)` layout.
#[derive(Debug, Clone)]
pub struct RowEncoding {
    pub state: StateVector,
    pub layout: RegisterLayout,
    /// Unpadded number of columns (`n + 1` for augmented matrices).
    pub data_dim: usize,
    pub rows: usize,
}

#[derive(Debug, Clone)]
pub struct PreparedInput {
    pub state: StateVector,
    pub success_probability: f64,
    /// Sampled number of runs until the first success.
    pub attempts: u64,
    pub hadamard_gates: u64,
}

/// Loads `|chi>` for the rows of `m`. The data register is most significant.
pub fn build_chi(m: &RealMatrix) -> Result<RowEncoding> {
    let norm = m.frobenius_norm();
    if !(norm > ZERO_NORM) {
        return Err(Error::EmptyMatrix);
    }
    let (rows, cols) = (m.nrows(), m.ncols());
    let data_qubits = qubits_for_dim(cols);
    let index_qubits = qubits_for_dim(rows);
    let layout = RegisterLayout::new(vec![(DATA, data_qubits), (INDEX, index_qubits)])?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); layout.dim()];
    let src = m.as_dmatrix();
    for i in 0..rows {
        for k in 0..cols {
            amplitudes[(k << index_qubits) | i] = Complex64::new(src[(i, k)] / norm, 0.0);
        }
    }
    let state = StateVector::from_amplitudes_unchecked(amplitudes);
    Ok(RowEncoding { state, layout, data_dim: cols, rows })
}

/// Walsh-Hadamard on the index register, then postselection on index `0`.
pub fn postselect_input_state(chi: &RowEncoding, seed: u64) -> Result<PreparedInput> {
    let index_qubits = chi.layout.width(INDEX)?;
    let mixed = chi.state.walsh_hadamard(&chi.layout, INDEX)?;
    let post = postselect(&mixed, &chi.layout, INDEX, 0)?.ok_or(Error::ZeroColumnSum)?;
    // ||M^T e|| / ||M||_F = sqrt(p 2^k)
    if (post.probability * (1u64 << index_qubits) as f64).sqrt() <= ZERO_NORM {
        return Err(Error::ZeroColumnSum);
    }
    Ok(PreparedInput {
        state: post.state,
        success_probability: post.probability,
        attempts: rng::attempts_until_success(post.probability, seed),
        hadamard_gates: index_qubits as u64,
    })
}

/// Reduced density matrix of the data register of `|chi>`: `M^T M / tr(M^T M)`,
/// zero-padded to the data register dimension.
pub fn prepare_density_k(m: &RealMatrix) -> Result<DensityMatrix> {
    let chi = build_chi(m)?;
    chi.state.partial_trace(&chi.layout, DATA)
}

/// `|x~>` for `x~ = (x_0, ..., x_{n-1}, 1)`.
pub fn prepare_sample_state(x: &[f64]) -> Result<StateVector> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidMatrix("sample entries must be finite".into()));
    }
    let mut augmented = x.to_vec();
    augmented.push(1.0);
    crate::quantum::normalize_real(&augmented)
}

/// `N_x~ = sum x_i^2 + 1`.
pub fn sample_norm_sqr(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() + 1.0
}
