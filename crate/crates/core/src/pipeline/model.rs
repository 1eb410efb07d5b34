//! JSON model files. Complex amplitudes are stored as `[re, im]` pairs.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::{ClassicalModel, Hyperplane};
use crate::error::{Error, Result};
use crate::hhl::{QuantumTrainConfig, TrainingReport};
use crate::quantum::StateVector;

pub const MODEL_VERSION: &str = "qtsvm-model/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalSection {
    pub plane1: Hyperplane,
    pub plane2: Hyperplane,
    pub c1: f64,
    pub c2: f64,
    pub ridge: f64,
}

impl From<&ClassicalModel> for ClassicalSection {
    fn from(m: &ClassicalModel) -> Self {
        Self { plane1: m.plane1.clone(), plane2: m.plane2.clone(), c1: m.c1, c2: m.c2, ridge: m.ridge }
    }
}

impl ClassicalSection {
    pub fn model(&self) -> ClassicalModel {
        ClassicalModel { plane1: self.plane1.clone(), plane2: self.plane2.clone(), c1: self.c1, c2: self.c2, ridge: self.ridge }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumSection {
    pub state1: Vec<[f64; 2]>,
    pub state2: Vec<[f64; 2]>,
    pub config: QuantumTrainConfig,
    pub seed: u64,
    /// `|<state_i | classical_i>|` against the normalized classical solution.
    pub fidelity1: f64,
    pub fidelity2: f64,
    pub report: TrainingReport,
}

pub fn encode_state(state: &StateVector) -> Vec<[f64; 2]> {
    state.amplitudes().iter().map(|z| [z.re, z.im]).collect()
}

pub fn decode_state(pairs: &[[f64; 2]]) -> Result<StateVector> {
    StateVector::from_amplitudes(pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
}

impl QuantumSection {
    pub fn states(&self) -> Result<(StateVector, StateVector)> {
        Ok((decode_state(&self.state1)?, decode_state(&self.state2)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: String,
    /// Number of features.
    pub n: usize,
    pub dataset_fingerprint: String,
    pub classical: ClassicalSection,
    pub quantum: Option<QuantumSection>,
}

impl ModelFile {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let version = value.get("version").and_then(|v| v.as_str()).unwrap_or("<missing>");
        if version != MODEL_VERSION {
            return Err(Error::ModelVersion { found: version.to_string(), expected: MODEL_VERSION.to_string() });
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
