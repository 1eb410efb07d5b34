use num_complex::Complex64;

use super::layout::{qubits_for_dim, RegisterLayout, RegisterSpan};
use crate::error::{Error, Result};
use crate::numerics::{unitarity_deviation, CMatrix};

/// Tolerance on `sum |amplitude|^2 = 1`.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Tolerance on `U^dagger U = I` for caller-supplied operators.
pub const UNITARY_TOLERANCE: f64 = 1e-9;
/// Vectors with smaller norm cannot be normalized.
pub const ZERO_NORM: f64 = 1e-14;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Normalized amplitude vector over `2^num_qubits` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized over a power-of-two length.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidLayout(format!("amplitude count {len} is not a power of two >= 2")));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidConfig(format!("state norm^2 is {norm_sqr}, expected 1")));
        }
        Ok(Self { num_qubits: len.trailing_zeros() as usize, amplitudes })
    }

    pub(crate) fn from_amplitudes_unchecked(amplitudes: Vec<Complex64>) -> Self {
        debug_assert!(amplitudes.len().is_power_of_two());
        Self { num_qubits: amplitudes.len().trailing_zeros() as usize, amplitudes }
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if num_qubits == 0 || index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: index });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amplitudes })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Real parts of the amplitudes; meaningful for states with real amplitudes.
    pub fn real_parts(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.re).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Multiplies every amplitude by `e^{i theta}`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        Self { num_qubits: self.num_qubits, amplitudes: self.amplitudes.iter().map(|a| a * phase).collect() }
    }

    /// Kronecker product `|self> ⊗ |other>`; `self` becomes the most significant part.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            amplitudes.extend(other.amplitudes.iter().map(|b| a * b));
        }
        StateVector { num_qubits: self.num_qubits + other.num_qubits, amplitudes }
    }

    fn check_layout(&self, layout: &RegisterLayout) -> Result<()> {
        if layout.total_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, found: layout.total_qubits() });
        }
        Ok(())
    }

    /// Applies `u` to the named register.
    pub fn apply_unitary(&self, u: &CMatrix, layout: &RegisterLayout, register: &str) -> Result<StateVector> {
        self.check_layout(layout)?;
        let span = layout.span(register)?;
        check_operator(u, span.dim())?;
        let mut out = self.clone();
        out.apply_on_span(u, span, None);
        Ok(out)
    }

    /// Applies `u` to `target` on the branch where qubit `control_bit` (counted
    /// from the least significant qubit) of register `control` is set.
    pub fn apply_controlled(
        &self,
        u: &CMatrix,
        layout: &RegisterLayout,
        control: &str,
        control_bit: usize,
        target: &str,
    ) -> Result<StateVector> {
        self.check_layout(layout)?;
        let control_span = layout.span(control)?;
        if control == target {
            return Err(Error::InvalidLayout("control and target registers must differ".into()));
        }
        if control_bit >= control_span.width {
            return Err(Error::DimensionMismatch { expected: control_span.width, found: control_bit });
        }
        let span = layout.span(target)?;
        check_operator(u, span.dim())?;
        let mut out = self.clone();
        out.apply_on_span(u, span, Some(control_span.shift + control_bit));
        Ok(out)
    }

    pub(crate) fn apply_on_span(&mut self, u: &CMatrix, span: RegisterSpan, control_qubit: Option<usize>) {
        let block = span.dim();
        let mut buffer = vec![Complex64::new(0.0, 0.0); block];
        for rest in 0..(self.dim() >> span.width) {
            let base = span.base_index(rest);
            if let Some(q) = control_qubit {
                if (base >> q) & 1 == 0 {
                    continue;
                }
            }
            for (v, slot) in buffer.iter_mut().enumerate() {
                *slot = self.amplitudes[base + (v << span.shift)];
            }
            for row in 0..block {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, amp) in buffer.iter().enumerate() {
                    acc += u[(row, col)] * amp;
                }
                self.amplitudes[base + (row << span.shift)] = acc;
            }
        }
    }

    /// Applies `op(value)` to `target` on each branch where register `control`
    /// holds `value`; `None` leaves that branch untouched.
    pub(crate) fn apply_value_controlled(
        &mut self,
        layout: &RegisterLayout,
        control: &str,
        target: &str,
        op: impl Fn(usize) -> Option<CMatrix>,
    ) -> Result<()> {
        self.check_layout(layout)?;
        let control_span = layout.span(control)?;
        let target_span = layout.span(target)?;
        let ops: Vec<Option<CMatrix>> = (0..control_span.dim()).map(op).collect();
        let block = target_span.dim();
        let mut buffer = vec![Complex64::new(0.0, 0.0); block];
        for rest in 0..(self.dim() >> target_span.width) {
            let base = target_span.base_index(rest);
            let Some(u) = &ops[control_span.value_of(base)] else { continue };
            for (v, slot) in buffer.iter_mut().enumerate() {
                *slot = self.amplitudes[base + (v << target_span.shift)];
            }
            for row in 0..block {
                let acc = buffer.iter().enumerate().map(|(col, amp)| u[(row, col)] * amp).sum();
                self.amplitudes[base + (row << target_span.shift)] = acc;
            }
        }
        Ok(())
    }

    /// `H^{⊗k}` on the named register.
    pub fn walsh_hadamard(&self, layout: &RegisterLayout, register: &str) -> Result<StateVector> {
        self.check_layout(layout)?;
        let span = layout.span(register)?;
        let mut out = self.clone();
        for qubit in span.shift..span.shift + span.width {
            out.hadamard_qubit(qubit);
        }
        Ok(out)
    }

    pub(crate) fn hadamard_qubit(&mut self, qubit: usize) {
        let stride = 1usize << qubit;
        for index in 0..self.dim() {
            if index & stride == 0 {
                let a = self.amplitudes[index];
                let b = self.amplitudes[index | stride];
                self.amplitudes[index] = (a + b) * FRAC_1_SQRT_2;
                self.amplitudes[index | stride] = (a - b) * FRAC_1_SQRT_2;
            }
        }
    }

    /// Swaps registers `a` and `b` (equal widths) on branches where the
    /// single-qubit register `control` is `|1>`.
    pub fn controlled_swap(&self, layout: &RegisterLayout, control: &str, a: &str, b: &str) -> Result<StateVector> {
        self.check_layout(layout)?;
        let c = layout.span(control)?;
        let sa = layout.span(a)?;
        let sb = layout.span(b)?;
        if sa.width != sb.width {
            return Err(Error::DimensionMismatch { expected: sa.width, found: sb.width });
        }
        if c.width != 1 {
            return Err(Error::InvalidLayout("swap control must be a single qubit".into()));
        }
        let mut out = self.clone();
        for index in 0..self.dim() {
            if c.value_of(index) == 0 {
                continue;
            }
            let (va, vb) = (sa.value_of(index), sb.value_of(index));
            if va < vb {
                let cleared = index & !(sa.mask() << sa.shift) & !(sb.mask() << sb.shift);
                let partner = cleared | (vb << sa.shift) | (va << sb.shift);
                out.amplitudes.swap(index, partner);
            }
        }
        Ok(out)
    }
}

fn check_operator(u: &CMatrix, dim: usize) -> Result<()> {
    if u.nrows() != dim || u.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: u.nrows() });
    }
    let deviation = unitarity_deviation(u);
    if deviation > UNITARY_TOLERANCE {
        return Err(Error::NonUnitaryOperator { deviation });
    }
    Ok(())
}

/// Pads `v` with zeros to the next power of two (at least two) and normalizes.
pub fn normalize_to_state(v: &[Complex64]) -> Result<StateVector> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > ZERO_NORM) {
        return Err(Error::ZeroVector);
    }
    let dim = 1usize << qubits_for_dim(v.len());
    let mut amplitudes: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
    amplitudes.resize(dim, Complex64::new(0.0, 0.0));
    Ok(StateVector::from_amplitudes_unchecked(amplitudes))
}

pub fn normalize_real(v: &[f64]) -> Result<StateVector> {
    let complex: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    normalize_to_state(&complex)
}

/// `|<a|b>|`, insensitive to global phase.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm().min(1.0))
}

/// Single-qubit Hadamard matrix.
pub fn hadamard() -> CMatrix {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    CMatrix::from_row_slice(2, 2, &[h, h, h, -h])
}

/// Dense `H^{⊗k}` matrix.
pub fn hadamard_matrix(k: usize) -> CMatrix {
    let dim = 1usize << k;
    let scale = (dim as f64).sqrt().recip();
    CMatrix::from_fn(dim, dim, |i, j| {
        let sign = if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(sign * scale, 0.0)
    })
}
