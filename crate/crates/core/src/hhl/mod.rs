//! HHL-style quantum linear solver over a dense statevector.
//!
//! Registers are laid out as `(ancilla, clock, data)`. Phase estimation uses
//! controlled powers of `U = e^{+i H t0}`, so clock value `k` decodes to the
//! eigenvalue `2 pi k / (2^q t0)`. After the conditional rotation the phase
//! estimation is undone and the run succeeds when the ancilla reads `1` and
//! the clock is back in `|0>`.

mod training;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use training::{
    train_quantum, InputStats, QuantumTrainConfig, QuantumTraining, RegisterWidths, SolveStats, T0Policy,
    TrainingReport,
};

use crate::error::{Error, Result};
use crate::hamiltonian::{matrix_power, SplitHamiltonian};
use crate::numerics::CMatrix;
use crate::quantum::{postselect, register_probabilities, RegisterLayout, StateVector};
use crate::rng;
use crate::state_prep::DATA;

pub const CLOCK: &str = "clock";
pub const ANCILLA: &str = "ancilla";

/// Eigenvalues below `SUPPORT_FLOOR * lambda_max` are treated as padding.
const SUPPORT_FLOOR: f64 = 1e-10;

pub type GateCounts = BTreeMap<String, u64>;

pub(crate) fn add_gates(into: &mut GateCounts, from: &GateCounts) {
    for (gate, count) in from {
        *into.entry(gate.clone()).or_insert(0) += count;
    }
}

/// How controlled evolutions are realized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evolution {
    /// Exact `e^{iHt}` from the eigendecomposition.
    Exact,
    /// `steps` first-order Trotter steps per application of `e^{iH t0}`.
    Trotter { steps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HhlConfig {
    pub clock_qubits: usize,
    pub t0: f64,
    pub inversion_constant: f64,
    pub eigenvalue_cutoff: f64,
    pub evolution: Evolution,
}

impl HhlConfig {
    /// Picks `t0` so that `lambda_max t0 = pi` (unless given), the inversion
    /// constant `0.9 lambda_min` and the cutoff `lambda_min / 2`, where
    /// `lambda_min` is the smallest nonzero eigenvalue. Clock values below the
    /// cutoff only carry phase-estimation leakage and padding.
    pub fn for_hamiltonian(h: &SplitHamiltonian, clock_qubits: usize, evolution: Evolution, t0: Option<f64>) -> Result<Self> {
        let eig = h.eigen();
        let lambda_max = eig.max_eigenvalue();
        if !(lambda_max > 0.0) {
            return Err(Error::SingularSystem { min_eigenvalue: lambda_max });
        }
        let lambda_min = eig
            .eigenvalues
            .iter()
            .copied()
            .find(|&l| l > SUPPORT_FLOOR * lambda_max)
            .unwrap_or(lambda_max);
        let t0 = t0.unwrap_or(PI / lambda_max);
        let config = Self {
            clock_qubits,
            t0,
            inversion_constant: 0.9 * lambda_min,
            eigenvalue_cutoff: 0.5 * lambda_min,
            evolution,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.clock_qubits == 0 || self.clock_qubits > 20 {
            return Err(Error::InvalidConfig(format!("clock qubits must be in 1..=20, got {}", self.clock_qubits)));
        }
        if !(self.t0 > 0.0) || !self.t0.is_finite() {
            return Err(Error::InvalidConfig(format!("t0 must be positive, got {}", self.t0)));
        }
        if !(self.inversion_constant > 0.0) {
            return Err(Error::InvalidConfig(format!("inversion constant must be positive, got {}", self.inversion_constant)));
        }
        if !(self.eigenvalue_cutoff >= 0.0) {
            return Err(Error::InvalidConfig(format!("cutoff must be nonnegative, got {}", self.eigenvalue_cutoff)));
        }
        if let Evolution::Trotter { steps: 0 } = self.evolution {
            return Err(Error::InvalidConfig("Trotter evolution needs at least one step".into()));
        }
        Ok(())
    }

    pub fn clock_dim(&self) -> usize {
        1 << self.clock_qubits
    }

    /// Eigenvalue encoded by clock value `k`.
    pub fn decode(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / (self.clock_dim() as f64 * self.t0)
    }

    /// Amplitude moved to ancilla `|1>` on clock value `k`; `None` below the cutoff.
    pub fn inversion_amplitude(&self, k: usize) -> Option<f64> {
        let lambda = self.decode(k);
        if lambda < self.eigenvalue_cutoff || lambda <= 0.0 {
            None
        } else {
            Some((self.inversion_constant / lambda).min(1.0))
        }
    }
}

/// Phase-estimation unitary `W` on `(clock, data)`, ready to apply forwards or
/// backwards inside any layout that holds both registers.
struct PhaseEstimationCircuit {
    clock_qubits: usize,
    /// `U^{2^j}` for clock qubit `j`.
    powers: Vec<CMatrix>,
    inverse_qft: CMatrix,
    gates: GateCounts,
}

impl PhaseEstimationCircuit {
    fn new(h: &SplitHamiltonian, config: &HhlConfig) -> Self {
        let q = config.clock_qubits;
        let mut gates = GateCounts::new();
        let powers: Vec<CMatrix> = match config.evolution {
            Evolution::Exact => (0..q).map(|j| h.exact_evolution(-config.t0 * (1u64 << j) as f64)).collect(),
            Evolution::Trotter { steps } => {
                let step = h.trotter_step(-config.t0 / steps as f64);
                let mut current = matrix_power(&step, steps as u64);
                let mut powers = Vec::with_capacity(q);
                for _ in 0..q {
                    let next = &current * &current;
                    powers.push(std::mem::replace(&mut current, next));
                }
                let applications = ((1u64 << q) - 1) * steps as u64 * h.term_count() as u64;
                gates.insert("trotter_factor".into(), applications);
                powers
            }
        };
        gates.insert("hadamard".into(), 2 * q as u64);
        gates.insert("controlled_evolution".into(), q as u64);
        gates.insert("controlled_phase".into(), (q * (q - 1) / 2) as u64);
        gates.insert("swap".into(), (q / 2) as u64);
        Self { clock_qubits: q, powers, inverse_qft: inverse_qft(q), gates }
    }

    fn apply(&self, state: &mut StateVector, layout: &RegisterLayout) -> Result<()> {
        let clock = layout.span(CLOCK)?;
        let data = layout.span(DATA)?;
        for qubit in clock.shift..clock.shift + clock.width {
            state.hadamard_qubit(qubit);
        }
        for (j, u) in self.powers.iter().enumerate() {
            state.apply_on_span(u, data, Some(clock.shift + j));
        }
        state.apply_on_span(&self.inverse_qft, clock, None);
        Ok(())
    }

    fn apply_inverse(&self, state: &mut StateVector, layout: &RegisterLayout) -> Result<()> {
        let clock = layout.span(CLOCK)?;
        let data = layout.span(DATA)?;
        state.apply_on_span(&self.inverse_qft.adjoint(), clock, None);
        for (j, u) in self.powers.iter().enumerate().rev() {
            state.apply_on_span(&u.adjoint(), data, Some(clock.shift + j));
        }
        for qubit in clock.shift..clock.shift + self.clock_qubits {
            state.hadamard_qubit(qubit);
        }
        Ok(())
    }
}

/// `QFT^dagger` on `q` qubits: entry `(k, tau)` is `e^{-2 pi i k tau / N} / sqrt(N)`.
pub fn inverse_qft(q: usize) -> CMatrix {
    let n = 1usize << q;
    let scale = (n as f64).sqrt().recip();
    CMatrix::from_fn(n, n, |k, tau| {
        let phase = -2.0 * PI * ((k * tau) % n) as f64 / n as f64;
        Complex64::from_polar(scale, phase)
    })
}

/// Joint `(clock, data)` state after phase estimation.
#[derive(Debug, Clone)]
pub struct PhaseEstimate {
    pub state: StateVector,
    pub layout: RegisterLayout,
    pub gate_counts: GateCounts,
}

impl PhaseEstimate {
    pub fn clock_distribution(&self) -> Vec<f64> {
        register_probabilities(&self.state, &self.layout, CLOCK).expect("clock register present")
    }
}

fn check_inputs(h: &SplitHamiltonian, b: &StateVector, config: &HhlConfig) -> Result<()> {
    config.validate()?;
    if h.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: b.dim() });
    }
    let product = h.eigen().max_eigenvalue() * config.t0;
    if product >= 2.0 * PI {
        return Err(Error::PhaseWraparound { product });
    }
    Ok(())
}

fn joint_layout(config: &HhlConfig, b: &StateVector) -> Result<RegisterLayout> {
    RegisterLayout::new(vec![(CLOCK, config.clock_qubits), (DATA, b.num_qubits())])
}

pub fn phase_estimation(h: &SplitHamiltonian, b: &StateVector, config: &HhlConfig) -> Result<PhaseEstimate> {
    check_inputs(h, b, config)?;
    let circuit = PhaseEstimationCircuit::new(h, config);
    let layout = joint_layout(config, b)?;
    let mut state = StateVector::basis(config.clock_qubits, 0)?.tensor(b);
    circuit.apply(&mut state, &layout)?;
    Ok(PhaseEstimate { state, layout, gate_counts: circuit.gates })
}

/// Appends an ancilla (most significant) and rotates it to
/// `sqrt(1 - r^2)|0> + r|1>` with `r = C / lambda(k)` on each clock value `k`
/// above the cutoff. Ratios above one are clamped.
pub fn eigenvalue_inversion(
    joint: &StateVector,
    layout: &RegisterLayout,
    config: &HhlConfig,
) -> Result<(StateVector, RegisterLayout)> {
    let layout = RegisterLayout::single(ANCILLA, 1)?.concat(layout)?;
    let mut state = StateVector::basis(1, 0)?.tensor(joint);
    state.apply_value_controlled(&layout, CLOCK, ANCILLA, |k| config.inversion_amplitude(k).map(ry_from_amplitude))?;
    Ok((state, layout))
}

fn ry_from_amplitude(r: f64) -> CMatrix {
    let s = r;
    let c = (1.0 - r * r).max(0.0).sqrt();
    CMatrix::from_row_slice(2, 2, &[Complex64::new(c, 0.0), Complex64::new(-s, 0.0), Complex64::new(s, 0.0), Complex64::new(c, 0.0)])
}

#[derive(Debug, Clone)]
pub struct HhlResult {
    pub solution_state: StateVector,
    /// Joint probability of ancilla `1` and clock `0`.
    pub success_probability: f64,
    pub ancilla_probability: f64,
    /// Probability of clock `0` given ancilla `1`.
    pub clock_return_probability: f64,
    pub repetitions: u64,
    pub gate_counts: GateCounts,
    pub config: HhlConfig,
}

/// Prepares a state proportional to `H^{-1}|b>` on the data register.
pub fn solve_qls(h: &SplitHamiltonian, b: &StateVector, config: &HhlConfig, seed: u64) -> Result<HhlResult> {
    check_inputs(h, b, config)?;
    let circuit = PhaseEstimationCircuit::new(h, config);
    let joint_layout = joint_layout(config, b)?;
    let mut joint = StateVector::basis(config.clock_qubits, 0)?.tensor(b);
    circuit.apply(&mut joint, &joint_layout)?;

    let clock = register_probabilities(&joint, &joint_layout, CLOCK)?;
    let invertible_weight: f64 =
        clock.iter().enumerate().filter(|(k, _)| config.inversion_amplitude(*k).is_some()).map(|(_, p)| p).sum();
    if invertible_weight <= 1e-12 {
        return Err(Error::SingularOnSupport);
    }

    let (mut state, layout) = eigenvalue_inversion(&joint, &joint_layout, config)?;
    circuit.apply_inverse(&mut state, &layout)?;

    let flagged = postselect(&state, &layout, ANCILLA, 1)?.ok_or(Error::SingularOnSupport)?;
    let returned = postselect(&flagged.state, &flagged.layout, CLOCK, 0)?.ok_or(Error::SingularOnSupport)?;
    let success_probability = flagged.probability * returned.probability;
    if success_probability <= 1e-300 {
        return Err(Error::SingularOnSupport);
    }

    let mut gate_counts = GateCounts::new();
    add_gates(&mut gate_counts, &circuit.gates);
    add_gates(&mut gate_counts, &circuit.gates);
    let q = config.clock_qubits as u64;
    gate_counts.insert("controlled_rotation".into(), q);
    gate_counts.insert("measurement".into(), 1 + q);

    Ok(HhlResult {
        solution_state: returned.state,
        success_probability,
        ancilla_probability: flagged.probability,
        clock_return_probability: returned.probability,
        repetitions: rng::attempts_until_success(success_probability, seed),
        gate_counts,
        config: *config,
    })
}
