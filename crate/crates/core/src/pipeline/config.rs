use serde::{Deserialize, Serialize};

use crate::classical::check_penalties;
use crate::error::{Error, Result};
use crate::hhl::{Evolution, QuantumTrainConfig, T0Policy};
use crate::rng::DEFAULT_SEED;
use crate::swap::Sampling;

pub const SEED_ENV: &str = "QTSVM_SEED";
pub const DEFAULT_MAX_QUBITS: usize = 14;
pub const DEFAULT_SHOTS: u64 = 100_000;
pub const DEFAULT_CLOCK_QUBITS: usize = 8;
/// Largest cap accepted; a 30-qubit statevector already takes 16 GiB.
pub const MAX_QUBIT_CAP: usize = 30;

/// Every free parameter of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub c1: f64,
    pub c2: f64,
    pub ridge: f64,
    pub clock_qubits: usize,
    pub t0: T0Policy,
    pub evolution: Evolution,
    pub sampling: Sampling,
    pub seed: u64,
    pub max_qubits: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            c1: 1.0,
            c2: 1.0,
            ridge: 0.0,
            clock_qubits: DEFAULT_CLOCK_QUBITS,
            t0: T0Policy::Auto,
            evolution: Evolution::Exact,
            sampling: Sampling::Shots(DEFAULT_SHOTS),
            seed: DEFAULT_SEED,
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        check_penalties(self.c1, self.c2).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if !(self.ridge >= 0.0) || !self.ridge.is_finite() {
            return Err(Error::InvalidConfig(format!("ridge must be nonnegative, got {}", self.ridge)));
        }
        if !(1..=20).contains(&self.clock_qubits) {
            return Err(Error::InvalidConfig(format!("clock qubits must be in 1..=20, got {}", self.clock_qubits)));
        }
        if let T0Policy::Explicit(t0) = self.t0 {
            if !(t0 > 0.0) || !t0.is_finite() {
                return Err(Error::InvalidConfig(format!("t0 must be positive, got {t0}")));
            }
        }
        if let Evolution::Trotter { steps: 0 } = self.evolution {
            return Err(Error::InvalidConfig("Trotter steps must be at least 1".into()));
        }
        if let Sampling::Shots(0) = self.sampling {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        if !(2..=MAX_QUBIT_CAP).contains(&self.max_qubits) {
            return Err(Error::InvalidConfig(format!("qubit cap must be in 2..={MAX_QUBIT_CAP}, got {}", self.max_qubits)));
        }
        Ok(())
    }

    pub fn quantum(&self) -> QuantumTrainConfig {
        QuantumTrainConfig { clock_qubits: self.clock_qubits, t0: self.t0, evolution: self.evolution, max_qubits: self.max_qubits }
    }
}

/// Seed precedence: explicit value, then `QTSVM_SEED`, then [`DEFAULT_SEED`].
pub fn resolve_seed(explicit: Option<u64>, env_value: Option<&str>) -> Result<u64> {
    if let Some(seed) = explicit {
        return Ok(seed);
    }
    match env_value {
        Some(text) => text
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("{SEED_ENV} must be an unsigned integer, got `{text}`"))),
        None => Ok(DEFAULT_SEED),
    }
}
