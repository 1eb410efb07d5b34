//! Prediction by SWAP tests and a projective norm measurement.
//!
//! The SWAP test gives `|<w_i, b_i | x~>|^2 = |w_i . x + b_i|^2 / (||(w_i, b_i)||^2 N_x~)`
//! and measuring `{I - |n><n|, |n><n|}` gives `||w_i||^2 / ||(w_i, b_i)||^2`, so
//! `ratio_i = I_i N_x~ / ||w_i||^2` equals the squared distance to hyperplane `i`.
//! Only squared overlaps are observed, so the sign of the hyperplane states is
//! irrelevant.

use serde::{Deserialize, Serialize};

use crate::classical::Label;
use crate::error::{Error, Result};
use crate::numerics::CMatrix;
use crate::quantum::{measure_projective, register_probabilities, sample_counts, RegisterLayout, StateVector};
use crate::rng::child_seed;
use crate::state_prep::{prepare_sample_state, sample_norm_sqr};

/// Padding weight above which a hyperplane state is rejected.
pub const PADDING_TOLERANCE: f64 = 1e-6;
/// `||w||^2` floor in exact-probability mode.
pub const EXACT_NORM_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "shots", rename_all = "snake_case")]
pub enum Sampling {
    /// Infinite-shot limit: estimates are the exact outcome probabilities.
    Exact,
    Shots(u64),
}

impl Sampling {
    fn shots(self) -> u64 {
        match self {
            Sampling::Exact => 0,
            Sampling::Shots(s) => s,
        }
    }

    fn validate(self) -> Result<()> {
        match self {
            Sampling::Shots(0) => Err(Error::InvalidConfig("shots must be at least 1".into())),
            _ => Ok(()),
        }
    }
}

/// Ties (`ratio1 == ratio2`) are labelled positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionConfig {
    pub sampling: Sampling,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapTestOutcome {
    /// `(1 + |<a|b>|^2) / 2`.
    pub exact_p0: f64,
    /// Observed frequency of ancilla `0`; equals `exact_p0` in exact mode.
    pub observed_p0: f64,
    /// `2 p0 - 1` clamped to `[0, 1]`.
    pub estimate: f64,
}

/// Exact probability of reading ancilla `0`, from simulating
/// `H, controlled-SWAP, H` on `ancilla (x) a (x) b`.
pub fn swap_test_probability(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let q = a.num_qubits();
    let layout = RegisterLayout::new(vec![("ancilla", 1), ("a", q), ("b", q)])?;
    let mut state = StateVector::basis(1, 0)?.tensor(a).tensor(b);
    let ancilla = layout.span("ancilla")?.shift;
    state.hadamard_qubit(ancilla);
    let mut state = state.controlled_swap(&layout, "ancilla", "a", "b")?;
    state.hadamard_qubit(ancilla);
    Ok(register_probabilities(&state, &layout, "ancilla")?[0])
}

pub fn swap_test(a: &StateVector, b: &StateVector, sampling: Sampling, seed: u64) -> Result<SwapTestOutcome> {
    sampling.validate()?;
    let exact_p0 = swap_test_probability(a, b)?;
    let observed_p0 = match sampling {
        Sampling::Exact => exact_p0,
        Sampling::Shots(shots) => sample_counts(&[exact_p0, 1.0 - exact_p0], shots, seed).frequency(0),
    };
    Ok(SwapTestOutcome { exact_p0, observed_p0, estimate: (2.0 * observed_p0 - 1.0).clamp(0.0, 1.0) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    /// `1 - |<n|psi>|^2`.
    pub exact: f64,
    pub estimate: f64,
}

/// Estimates `||w||^2` for a normalized `(w, b)` state with `n` weight
/// components by measuring `{I - |n><n|, |n><n|}` and reporting outcome `0`.
pub fn estimate_norm_w(state: &StateVector, n: usize, sampling: Sampling, seed: u64) -> Result<NormEstimate> {
    sampling.validate()?;
    if n >= state.dim() {
        return Err(Error::DimensionMismatch { expected: n + 1, found: state.dim() });
    }
    let leakage: f64 = state.amplitudes()[n + 1..].iter().map(|a| a.norm_sqr()).sum();
    if leakage > PADDING_TOLERANCE {
        return Err(Error::PaddingLeakage { weight: leakage, support: n + 1 });
    }
    let dim = state.dim();
    let mut p1 = CMatrix::zeros(dim, dim);
    p1[(n, n)] = num_complex::Complex64::new(1.0, 0.0);
    let p0 = CMatrix::identity(dim, dim) - &p1;
    let measurement = measure_projective(state, &[p0, p1], sampling.shots(), seed)?;
    let exact = measurement.probabilities[0];
    let estimate = match sampling {
        Sampling::Exact => exact,
        Sampling::Shots(_) => measurement.counts.frequency(0),
    };
    Ok(NormEstimate { exact, estimate })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimates {
    pub i1: f64,
    pub i2: f64,
    pub normsq_w1: f64,
    pub normsq_w2: f64,
    /// Estimated squared distance to the first hyperplane.
    pub ratio1: f64,
    pub ratio2: f64,
    /// `|ratio1 - ratio2|`; small margins are within estimation noise.
    pub margin: f64,
}

fn ratio(overlap: f64, normsq: f64, sample_norm: f64, sampling: Sampling) -> Result<f64> {
    let floor = match sampling {
        Sampling::Exact => EXACT_NORM_FLOOR,
        Sampling::Shots(shots) => 10.0 / shots as f64,
    };
    if normsq < floor {
        return Err(Error::DegenerateHyperplane { norm: normsq.max(0.0).sqrt() });
    }
    Ok(overlap * sample_norm / normsq)
}

/// Labels `x` by comparing estimated squared distances to the two hyperplanes.
pub fn classify(
    x: &[f64],
    state1: &StateVector,
    state2: &StateVector,
    config: &PredictionConfig,
) -> Result<(Label, DistanceEstimates)> {
    let sample = prepare_sample_state(x)?;
    for s in [state1, state2] {
        if s.dim() != sample.dim() {
            return Err(Error::DimensionMismatch { expected: s.dim(), found: sample.dim() });
        }
    }
    let n = x.len();
    let sampling = config.sampling;
    let seed = config.seed;
    let i1 = swap_test(state1, &sample, sampling, child_seed(seed, 1))?.estimate;
    let i2 = swap_test(state2, &sample, sampling, child_seed(seed, 2))?.estimate;
    let normsq_w1 = estimate_norm_w(state1, n, sampling, child_seed(seed, 3))?.estimate;
    let normsq_w2 = estimate_norm_w(state2, n, sampling, child_seed(seed, 4))?.estimate;
    let sample_norm = sample_norm_sqr(x);
    let ratio1 = ratio(i1, normsq_w1, sample_norm, sampling)?;
    let ratio2 = ratio(i2, normsq_w2, sample_norm, sampling)?;
    let estimates = DistanceEstimates { i1, i2, normsq_w1, normsq_w2, ratio1, ratio2, margin: (ratio1 - ratio2).abs() };
    Ok((Label::from_distances(ratio1, ratio2), estimates))
}

pub fn predict_quantum(x: &[f64], state1: &StateVector, state2: &StateVector, config: &PredictionConfig) -> Result<Label> {
    classify(x, state1, state2, config).map(|(label, _)| label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{predict_classical, ClassicalModel, Hyperplane};
    use crate::quantum::normalize_real;
    use crate::testutil::{gaussian, random_state};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn swap_probability_matches_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        for _ in 0..50 {
            let q = rng.random_range(1..=3);
            let a = random_state(q, &mut rng);
            let b = random_state(q, &mut rng);
            let overlap = a.inner(&b).unwrap().norm_sqr();
            assert!((swap_test_probability(&a, &b).unwrap() - (1.0 + overlap) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn swap_examples() {
        let a = normalize_real(&[1.0, 2.0, -1.0, 0.5]).unwrap();
        let same = swap_test(&a, &a, Sampling::Shots(1000), 3).unwrap();
        assert!((same.exact_p0 - 1.0).abs() < 1e-12);
        assert_eq!(same.estimate, 1.0);
        let e0 = StateVector::basis(2, 0).unwrap();
        let e1 = StateVector::basis(2, 1).unwrap();
        let orth = swap_test(&e0, &e1, Sampling::Exact, 0).unwrap();
        assert!((orth.exact_p0 - 0.5).abs() < 1e-12);
        assert!(orth.estimate.abs() < 1e-12);
        let short = StateVector::basis(1, 0).unwrap();
        assert!(matches!(swap_test(&e0, &short, Sampling::Exact, 0), Err(Error::DimensionMismatch { .. })));
        assert!(swap_test(&e0, &e1, Sampling::Shots(0), 0).is_err());
    }

    #[test]
    fn hoeffding_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(82);
        let a = random_state(2, &mut rng);
        let b = random_state(2, &mut rng);
        let exact = a.inner(&b).unwrap().norm_sqr();
        let outside = (0..1000u64)
            .filter(|&seed| (swap_test(&a, &b, Sampling::Shots(10_000), seed).unwrap().estimate - exact).abs() > 0.03)
            .count();
        let bound = 2.0 * (-2.0 * 1e4 * 0.015f64.powi(2)).exp() + 0.02;
        assert!((outside as f64 / 1000.0) <= bound, "{outside}");
    }

    #[test]
    fn more_shots_reduce_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let a = random_state(2, &mut rng);
        let b = random_state(2, &mut rng);
        let exact = a.inner(&b).unwrap().norm_sqr();
        let mean_err = |shots| {
            (0..200u64).map(|seed| (swap_test(&a, &b, Sampling::Shots(shots), seed).unwrap().estimate - exact).abs()).sum::<f64>()
                / 200.0
        };
        assert!(mean_err(100_000) <= mean_err(1_000));
    }

    #[test]
    fn norm_examples() {
        let bias = StateVector::basis(2, 2).unwrap();
        assert!(estimate_norm_w(&bias, 2, Sampling::Shots(1000), 1).unwrap().estimate.abs() < 1e-12);
        let e0 = StateVector::basis(2, 0).unwrap();
        assert!((estimate_norm_w(&e0, 2, Sampling::Shots(1000), 1).unwrap().estimate - 1.0).abs() < 1e-12);
        let s = normalize_real(&[3.0, 0.0, 4.0]).unwrap();
        assert!((estimate_norm_w(&s, 2, Sampling::Exact, 0).unwrap().exact - 9.0 / 25.0).abs() < 1e-12);
        let leaky = normalize_real(&[1.0, 0.0, 0.0, 0.1]).unwrap();
        assert!(matches!(estimate_norm_w(&leaky, 2, Sampling::Exact, 0), Err(Error::PaddingLeakage { .. })));
    }

    #[test]
    fn concrete_classification() {
        let s1 = StateVector::basis(2, 0).unwrap();
        let s2 = StateVector::basis(2, 1).unwrap();
        let config = PredictionConfig { sampling: Sampling::Exact, seed: 0 };
        let (label, est) = classify(&[1.0, 0.0], &s1, &s2, &config).unwrap();
        assert!((est.ratio1 - 1.0).abs() < 1e-12);
        assert!(est.ratio2.abs() < 1e-12);
        assert_eq!(label, Label::Negative);
        let (swapped, _) = classify(&[1.0, 0.0], &s2, &s1, &config).unwrap();
        assert_eq!(swapped, Label::Positive);
        assert!(matches!(classify(&[1.0, 0.0, 0.0, 0.0], &s1, &s2, &config), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn degenerate_hyperplane_is_rejected() {
        let bias = StateVector::basis(2, 2).unwrap();
        let e0 = StateVector::basis(2, 0).unwrap();
        for sampling in [Sampling::Exact, Sampling::Shots(100)] {
            let config = PredictionConfig { sampling, seed: 0 };
            assert!(matches!(classify(&[0.5, 0.5], &bias, &e0, &config), Err(Error::DegenerateHyperplane { .. })));
        }
    }

    #[test]
    fn sign_insensitive() {
        let mut rng = ChaCha8Rng::seed_from_u64(84);
        let s1 = normalize_real(&[0.3, -1.0, 0.7]).unwrap();
        let s2 = normalize_real(&[1.0, 0.2, -0.4]).unwrap();
        let x = [gaussian(&mut rng), gaussian(&mut rng)];
        for sampling in [Sampling::Exact, Sampling::Shots(5000)] {
            let config = PredictionConfig { sampling, seed: 9 };
            let a = classify(&x, &s1, &s2, &config).unwrap();
            let b = classify(&x, &s1.with_global_phase(std::f64::consts::PI), &s2, &config).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn exact_mode_matches_classical_predictor() {
        let mut rng = ChaCha8Rng::seed_from_u64(85);
        let mut compared = 0;
        while compared < 100 {
            let n = rng.random_range(1..=4);
            let plane = |rng: &mut ChaCha8Rng| {
                Hyperplane { w: (0..n).map(|_| gaussian(rng)).collect(), b: gaussian(rng) }
            };
            let model = ClassicalModel { plane1: plane(&mut rng), plane2: plane(&mut rng), c1: 1.0, c2: 1.0, ridge: 0.0 };
            let x: Vec<f64> = (0..n).map(|_| 2.0 * gaussian(&mut rng)).collect();
            let config = PredictionConfig { sampling: Sampling::Exact, seed: 0 };
            let (label, est) =
                classify(&x, &model.plane1.state().unwrap(), &model.plane2.state().unwrap(), &config).unwrap();
            let classical = predict_classical(&model, &x).unwrap();
            assert!((est.ratio1 - classical.d1.powi(2)).abs() < 1e-9 * (1.0 + classical.d1.powi(2)));
            if est.margin > 1e-9 {
                assert_eq!(label, classical.label);
                compared += 1;
            }
        }
    }
}
