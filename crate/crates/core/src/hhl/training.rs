use serde::{Deserialize, Serialize};

use super::{add_gates, solve_qls, Evolution, GateCounts, HhlConfig, HhlResult};
use crate::classical::{build_augmented, Dataset};
use crate::error::{Error, Result};
use crate::hamiltonian::{assemble_hamiltonians, HamiltonianPair};
use crate::numerics::{condition_number, RealMatrix};
use crate::quantum::{qubits_for_dim, StateVector};
use crate::rng::child_seed;
use crate::state_prep::{build_chi, postselect_input_state, PreparedInput, DATA};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", content = "value", rename_all = "snake_case")]
pub enum T0Policy {
    /// `lambda_max t0 = pi` from the simulated Hamiltonian.
    Auto,
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumTrainConfig {
    pub clock_qubits: usize,
    pub t0: T0Policy,
    pub evolution: Evolution,
    pub max_qubits: usize,
}

impl Default for QuantumTrainConfig {
    fn default() -> Self {
        Self { clock_qubits: 8, t0: T0Policy::Auto, evolution: Evolution::Exact, max_qubits: 14 }
    }
}

/// Register widths of every circuit used in training and prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterWidths {
    pub data: usize,
    pub index_positive: usize,
    pub index_negative: usize,
    pub clock: usize,
    pub ancilla: usize,
    /// Widest simulated statevector.
    pub peak: usize,
}

impl RegisterWidths {
    pub fn for_dataset(data: &Dataset, clock_qubits: usize) -> Self {
        let d = qubits_for_dim(data.n() + 1);
        let index_positive = qubits_for_dim(data.m1());
        let index_negative = qubits_for_dim(data.m2());
        let peak = [d + index_positive, d + index_negative, 1 + clock_qubits + d, 1 + 2 * d]
            .into_iter()
            .max()
            .unwrap_or(0);
        Self { data: d, index_positive, index_negative, clock: clock_qubits, ancilla: 1, peak }
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        if self.peak > cap {
            Err(Error::QubitCapExceeded { required: self.peak, cap })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputStats {
    pub success_probability: f64,
    pub attempts: u64,
}

impl From<&PreparedInput> for InputStats {
    fn from(p: &PreparedInput) -> Self {
        Self { success_probability: p.success_probability, attempts: p.attempts }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub config: HhlConfig,
    pub success_probability: f64,
    pub repetitions: u64,
    pub gate_counts: GateCounts,
}

impl From<&HhlResult> for SolveStats {
    fn from(r: &HhlResult) -> Self {
        Self {
            config: r.config,
            success_probability: r.success_probability,
            repetitions: r.repetitions,
            gate_counts: r.gate_counts.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub widths: RegisterWidths,
    /// Preparation of `|F^T e2>`, the right-hand side for the first plane.
    pub input_first: InputStats,
    /// Preparation of `|E^T e1>`, the right-hand side for the second plane.
    pub input_second: InputStats,
    pub solve_first: SolveStats,
    pub solve_second: SolveStats,
    pub state_prep_gates: GateCounts,
    pub total_gates: GateCounts,
    /// Condition numbers of the normalized Hamiltonians on the unpadded block.
    pub kappa_first: f64,
    pub kappa_second: f64,
}

#[derive(Debug, Clone)]
pub struct QuantumTraining {
    /// Proportional to `(w1, b1)` up to a global phase, padded.
    pub state1: StateVector,
    /// Proportional to `(w2, b2)` up to a global phase, padded.
    pub state2: StateVector,
    pub hamiltonians: HamiltonianPair,
    pub report: TrainingReport,
}

/// Quantum-simulated training: prepares `|F^T e2>` and `|E^T e1>`, builds the
/// normalized Hamiltonians from the reduced data-register states, and solves
/// both systems with [`solve_qls`].
pub fn train_quantum(data: &Dataset, c1: f64, c2: f64, config: &QuantumTrainConfig, seed: u64) -> Result<QuantumTraining> {
    let widths = RegisterWidths::for_dataset(data, config.clock_qubits);
    widths.check_cap(config.max_qubits)?;
    let aug = build_augmented(data, c1, c2)?;
    let e = RealMatrix::new(aug.e.clone())?;
    let f = RealMatrix::new(aug.f.clone())?;

    let chi_e = build_chi(&e)?;
    let chi_f = build_chi(&f)?;
    let rhs_first = postselect_input_state(&chi_f, child_seed(seed, 1))?;
    let rhs_second = postselect_input_state(&chi_e, child_seed(seed, 2))?;

    let k1_hat = chi_e.state.partial_trace(&chi_e.layout, DATA)?;
    let k2_hat = chi_f.state.partial_trace(&chi_f.layout, DATA)?;
    let pair = assemble_hamiltonians(&k1_hat, &k2_hat, aug.e.norm_squared(), aug.f.norm_squared(), c1, c2)?;

    let t0 = match config.t0 {
        T0Policy::Auto => None,
        T0Policy::Explicit(t) => Some(t),
    };
    let cfg_first = HhlConfig::for_hamiltonian(&pair.first, config.clock_qubits, config.evolution, t0)?;
    let cfg_second = HhlConfig::for_hamiltonian(&pair.second, config.clock_qubits, config.evolution, t0)?;
    let first = solve_qls(&pair.first, &rhs_first.state, &cfg_first, child_seed(seed, 3))?;
    let second = solve_qls(&pair.second, &rhs_second.state, &cfg_second, child_seed(seed, 4))?;

    let dim = data.n() + 1;
    let kappa_first = condition_number(&pair.first.matrix().leading_block(dim)?)?;
    let kappa_second = condition_number(&pair.second.matrix().leading_block(dim)?)?;

    let mut state_prep_gates = GateCounts::new();
    state_prep_gates.insert("hadamard".into(), rhs_first.hadamard_gates + rhs_second.hadamard_gates);
    state_prep_gates.insert("row_oracle".into(), 2);
    state_prep_gates.insert("measurement".into(), (widths.index_positive + widths.index_negative) as u64);
    let mut total_gates = state_prep_gates.clone();
    add_gates(&mut total_gates, &first.gate_counts);
    add_gates(&mut total_gates, &second.gate_counts);

    let report = TrainingReport {
        widths,
        input_first: InputStats::from(&rhs_first),
        input_second: InputStats::from(&rhs_second),
        solve_first: SolveStats::from(&first),
        solve_second: SolveStats::from(&second),
        state_prep_gates,
        total_gates,
        kappa_first,
        kappa_second,
    };
    Ok(QuantumTraining { state1: first.solution_state, state2: second.solution_state, hamiltonians: pair, report })
}
