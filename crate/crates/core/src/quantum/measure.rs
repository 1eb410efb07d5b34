use std::collections::BTreeMap;

use num_complex::Complex64;
use rand_distr::{Binomial, Distribution};

use super::layout::RegisterLayout;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, CVector};
use crate::rng;

/// Tolerance for completeness and orthogonality of projector sets.
pub const PROJECTOR_TOLERANCE: f64 = 1e-9;

/// Sampled measurement record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotCounts {
    pub counts: BTreeMap<usize, u64>,
    pub total_shots: u64,
    pub seed: u64,
}

impl ShotCounts {
    pub fn count(&self, outcome: usize) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    pub fn frequency(&self, outcome: usize) -> f64 {
        if self.total_shots == 0 {
            return 0.0;
        }
        self.count(outcome) as f64 / self.total_shots as f64
    }
}

/// Draws `shots` outcomes from `probabilities` as a sequence of conditional
/// binomials, so the cost does not grow with the shot count.
pub fn sample_counts(probabilities: &[f64], shots: u64, seed: u64) -> ShotCounts {
    let mut rng = rng::stream(seed, 1);
    let mut counts = BTreeMap::new();
    let mut remaining_shots = shots;
    let mut remaining_mass: f64 = probabilities.iter().map(|p| p.max(0.0)).sum();
    for (outcome, &p) in probabilities.iter().enumerate() {
        if remaining_shots == 0 {
            break;
        }
        let p = p.max(0.0);
        let conditional = if remaining_mass > 0.0 { (p / remaining_mass).clamp(0.0, 1.0) } else { 0.0 };
        let is_last_with_mass = probabilities[outcome + 1..].iter().all(|&q| q <= 0.0);
        let drawn = if is_last_with_mass && p > 0.0 {
            remaining_shots
        } else {
            Binomial::new(remaining_shots, conditional).expect("probability in [0, 1]").sample(&mut rng)
        };
        if drawn > 0 {
            counts.insert(outcome, drawn);
        }
        remaining_shots -= drawn;
        remaining_mass -= p;
    }
    ShotCounts { counts, total_shots: shots, seed }
}

/// Exact outcome statistics of a projective measurement plus a sampled record.
#[derive(Debug, Clone)]
pub struct ProjectiveMeasurement {
    pub probabilities: Vec<f64>,
    /// `P_m|psi> / sqrt(p(m))`, absent for outcomes of probability zero.
    pub post_states: Vec<Option<StateVector>>,
    pub counts: ShotCounts,
}

/// Measures `state` with the projector set `{P_m}`.
pub fn measure_projective(
    state: &StateVector,
    projectors: &[CMatrix],
    shots: u64,
    seed: u64,
) -> Result<ProjectiveMeasurement> {
    validate_projectors(projectors, state.dim())?;
    let psi = CVector::from_column_slice(state.amplitudes());
    let mut probabilities = Vec::with_capacity(projectors.len());
    let mut post_states = Vec::with_capacity(projectors.len());
    for p in projectors {
        let projected = p * &psi;
        let prob = projected.norm_squared();
        probabilities.push(prob);
        post_states.push(if prob > 1e-300 {
            let scale = prob.sqrt();
            Some(StateVector::from_amplitudes_unchecked(projected.iter().map(|z| z / scale).collect()))
        } else {
            None
        });
    }
    let counts = sample_counts(&probabilities, shots, seed);
    Ok(ProjectiveMeasurement { probabilities, post_states, counts })
}

fn validate_projectors(projectors: &[CMatrix], dim: usize) -> Result<()> {
    if projectors.is_empty() {
        return Err(Error::InvalidProjectorSet("no projectors".into()));
    }
    let mut sum = CMatrix::zeros(dim, dim);
    for (i, p) in projectors.iter().enumerate() {
        if p.nrows() != dim || p.ncols() != dim {
            return Err(Error::InvalidProjectorSet(format!("projector {i} is {}x{}, expected {dim}x{dim}", p.nrows(), p.ncols())));
        }
        if max_abs(&(p - p.adjoint())) > PROJECTOR_TOLERANCE {
            return Err(Error::InvalidProjectorSet(format!("projector {i} is not Hermitian")));
        }
        for (j, q) in projectors.iter().enumerate().skip(i) {
            let product = p * q;
            let deviation = if i == j { max_abs(&(product - p)) } else { max_abs(&product) };
            if deviation > PROJECTOR_TOLERANCE {
                return Err(Error::InvalidProjectorSet(format!("P{i} P{j} deviates by {deviation:.3e}")));
            }
        }
        sum += p;
    }
    if max_abs(&(sum - CMatrix::identity(dim, dim))) > PROJECTOR_TOLERANCE {
        return Err(Error::InvalidProjectorSet("projectors do not sum to the identity".into()));
    }
    Ok(())
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Outcome distribution of measuring one register in the computational basis.
pub fn register_probabilities(state: &StateVector, layout: &RegisterLayout, register: &str) -> Result<Vec<f64>> {
    if layout.total_qubits() != state.num_qubits() {
        return Err(Error::DimensionMismatch { expected: state.num_qubits(), found: layout.total_qubits() });
    }
    let span = layout.span(register)?;
    let mut probabilities = vec![0.0; span.dim()];
    for (index, amplitude) in state.amplitudes().iter().enumerate() {
        probabilities[span.value_of(index)] += amplitude.norm_sqr();
    }
    Ok(probabilities)
}

/// Result of conditioning on one register outcome.
#[derive(Debug, Clone)]
pub struct Postselected {
    pub probability: f64,
    pub state: StateVector,
    /// Layout with the measured register removed.
    pub layout: RegisterLayout,
}

/// Measures `register`, keeps the branch with value `outcome`, renormalizes and
/// drops the measured register. Returns `Ok(None)` when the branch has zero weight.
pub fn postselect(
    state: &StateVector,
    layout: &RegisterLayout,
    register: &str,
    outcome: usize,
) -> Result<Option<Postselected>> {
    if layout.total_qubits() != state.num_qubits() {
        return Err(Error::DimensionMismatch { expected: state.num_qubits(), found: layout.total_qubits() });
    }
    let span = layout.span(register)?;
    if outcome >= span.dim() {
        return Err(Error::DimensionMismatch { expected: span.dim(), found: outcome });
    }
    let remaining = layout.without(register)?;
    let kept: Vec<Complex64> = (0..(state.dim() >> span.width))
        .map(|rest| state.amplitude(span.base_index(rest) + (outcome << span.shift)))
        .collect();
    let probability: f64 = kept.iter().map(|a| a.norm_sqr()).sum();
    if probability <= 0.0 {
        return Ok(None);
    }
    let scale = probability.sqrt();
    let amplitudes = kept.into_iter().map(|a| a / scale).collect();
    Ok(Some(Postselected { probability, state: StateVector::from_amplitudes_unchecked(amplitudes), layout: remaining }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::state::normalize_real;
    use crate::testutil::random_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis_projectors(dim: usize) -> Vec<CMatrix> {
        (0..dim)
            .map(|i| {
                let mut p = CMatrix::zeros(dim, dim);
                p[(i, i)] = Complex64::new(1.0, 0.0);
                p
            })
            .collect()
    }

    #[test]
    fn deterministic_outcome() {
        let zero = StateVector::basis(1, 0).unwrap();
        let m = measure_projective(&zero, &basis_projectors(2), 1000, 1).unwrap();
        assert_eq!(m.probabilities, vec![1.0, 0.0]);
        assert_eq!(m.counts.count(0), 1000);
        assert!(m.post_states[1].is_none());
    }

    #[test]
    fn amplitude_squared_rule() {
        let (alpha, beta) = (0.6, 0.8);
        let psi = normalize_real(&[alpha, beta]).unwrap();
        let m = measure_projective(&psi, &basis_projectors(2), 10, 3).unwrap();
        assert!((m.probabilities[0] - alpha * alpha).abs() < 1e-15);
        assert!((m.probabilities[1] - beta * beta).abs() < 1e-15);
        let post = m.post_states[0].as_ref().unwrap();
        assert!((crate::quantum::fidelity(post, &StateVector::basis(1, 0).unwrap()).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(m.counts.counts.values().sum::<u64>(), 10);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for q in 1..=4 {
            let psi = random_state(q, &mut rng);
            let m = measure_projective(&psi, &basis_projectors(1 << q), 100, 0).unwrap();
            assert!((m.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn fair_coin_frequency_within_hoeffding_bound() {
        // P(|f - 1/2| > 0.01) <= 2 exp(-2 * 1e5 * 1e-4) ~ 4e-9 per seed.
        let plus = normalize_real(&[1.0, 1.0]).unwrap();
        let projectors = basis_projectors(2);
        let within = (0..200u64)
            .filter(|&seed| {
                let m = measure_projective(&plus, &projectors, 100_000, seed).unwrap();
                (m.counts.frequency(0) - 0.5).abs() <= 0.01
            })
            .count();
        assert!(within as f64 >= 0.99 * 200.0);
    }

    #[test]
    fn rejects_incomplete_or_overlapping_sets() {
        let zero = StateVector::basis(1, 0).unwrap();
        let p = basis_projectors(2);
        assert!(matches!(
            measure_projective(&zero, &p[..1], 1, 0),
            Err(Error::InvalidProjectorSet(_))
        ));
        let overlapping = vec![p[0].clone(), p[0].clone(), p[1].clone()];
        assert!(matches!(measure_projective(&zero, &overlapping, 1, 0), Err(Error::InvalidProjectorSet(_))));
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let probs = [0.2, 0.3, 0.5];
        assert_eq!(sample_counts(&probs, 1000, 9), sample_counts(&probs, 1000, 9));
        let counts = sample_counts(&probs, 1000, 9);
        assert_eq!(counts.counts.values().sum::<u64>(), 1000);
    }

    #[test]
    fn postselect_drops_register() {
        let layout = RegisterLayout::new(vec![("a", 1), ("b", 1)]).unwrap();
        let psi = normalize_real(&[1.0, 2.0, 0.0, 2.0]).unwrap();
        let post = postselect(&psi, &layout, "a", 0).unwrap().unwrap();
        assert!((post.probability - 5.0 / 9.0).abs() < 1e-15);
        assert_eq!(post.layout.registers(), &[("b".to_string(), 1)]);
        let expected = normalize_real(&[1.0, 2.0]).unwrap();
        assert!((crate::quantum::fidelity(&post.state, &expected).unwrap() - 1.0).abs() < 1e-15);
        let probs = register_probabilities(&psi, &layout, "b").unwrap();
        assert!((probs[0] - 1.0 / 9.0).abs() < 1e-15);
    }
}
