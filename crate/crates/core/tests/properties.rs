use num_complex::Complex64;
use proptest::prelude::*;
use qtsvm::classical::{predict_classical, train_classical, Dataset, Label};
use qtsvm::datagen::{generate_crossplanes, SynthSpec};
use qtsvm::hamiltonian::assemble_hamiltonians;
use qtsvm::numerics::{eigh, RealMatrix};
use qtsvm::pipeline::{predict, train, ModelFile, PredictMode, RunConfig, TrainMode};
use qtsvm::quantum::{RegisterLayout, StateVector};
use qtsvm::state_prep::{build_chi, postselect_input_state, prepare_density_k};
use qtsvm::swap::{classify, PredictionConfig, Sampling};

fn state_strategy(qubits: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << qubits)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            StateVector::from_amplitudes(v.into_iter().map(|(a, b)| Complex64::new(a / norm, b / norm)).collect()).unwrap()
        })
}

fn matrix_strategy(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(m, n)| prop::collection::vec(prop::collection::vec(-3.0f64..3.0, n), m))
}

fn separable_dataset() -> impl Strategy<Value = Dataset> {
    (2usize..6, 2usize..6, 1usize..4).prop_flat_map(|(m1, m2, n)| {
        (
            prop::collection::vec(prop::collection::vec(0.5f64..3.0, n), m1),
            prop::collection::vec(prop::collection::vec(-3.0f64..-0.5, n), m2),
        )
            .prop_map(|(pos, neg)| Dataset::from_rows(&pos, &neg).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduced_states_are_densities(state in state_strategy(4), split in 1usize..4) {
        let layout = RegisterLayout::new(vec![("a", split), ("b", 4 - split)]).unwrap();
        for keep in ["a", "b"] {
            let rho = state.partial_trace(&layout, keep).unwrap();
            prop_assert!((rho.trace() - 1.0).abs() < 1e-10);
            prop_assert!(eigh(&rho.to_hermitian()).min_eigenvalue() > -1e-10);
        }
    }

    #[test]
    fn density_k_is_normalized_gram(rows in matrix_strategy(6, 4)) {
        let m = RealMatrix::from_rows(&rows).unwrap();
        prop_assume!(m.frobenius_norm() > 1e-6);
        let rho = prepare_density_k(&m).unwrap();
        let gram = m.as_dmatrix().transpose() * m.as_dmatrix();
        let block = rho.cropped(m.ncols());
        for i in 0..m.ncols() {
            for j in 0..m.ncols() {
                prop_assert!((block[(i, j)].re - gram[(i, j)] / gram.trace()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn postselection_probability_is_in_unit_interval(rows in matrix_strategy(8, 4)) {
        let m = RealMatrix::from_rows(&rows).unwrap();
        prop_assume!(m.frobenius_norm() > 1e-6);
        if let Ok(prepared) = postselect_input_state(&build_chi(&m).unwrap(), 0) {
            prop_assert!(prepared.success_probability > 0.0 && prepared.success_probability <= 1.0);
            prop_assert!((prepared.state.norm_sqr() - 1.0).abs() < 1e-10);
            prop_assert!(prepared.attempts >= 1);
        }
    }

    #[test]
    fn normalized_hamiltonians_have_unit_trace(rows1 in matrix_strategy(5, 3), c1 in 0.01f64..100.0, c2 in 0.01f64..100.0) {
        let e = RealMatrix::from_rows(&rows1).unwrap();
        prop_assume!(e.frobenius_norm() > 1e-3);
        let k1 = prepare_density_k(&e).unwrap();
        let f = RealMatrix::from_rows(&rows1.iter().map(|r| r.iter().map(|v| v * 0.5 + 1.0).collect()).collect::<Vec<Vec<f64>>>()).unwrap();
        let k2 = prepare_density_k(&f).unwrap();
        let pair = assemble_hamiltonians(&k1, &k2, e.frobenius_norm().powi(2), f.frobenius_norm().powi(2), c1, c2).unwrap();
        prop_assert!((pair.first.matrix().trace() - 1.0).abs() < 1e-10);
        prop_assert!((pair.second.matrix().trace() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn classical_labels_are_scale_invariant(data in separable_dataset(), factor in 0.1f64..10.0, x in prop::collection::vec(-3.0f64..3.0, 3)) {
        let model = train_classical(&data, 1.0, 1.0, 0.0).unwrap();
        let scaled = data.map_rows(|r| r.iter().map(|v| v * factor).collect()).unwrap();
        let scaled_model = train_classical(&scaled, 1.0, 1.0, 0.0).unwrap();
        let x = &x[..data.n()];
        let xs: Vec<f64> = x.iter().map(|v| v * factor).collect();
        let a = predict_classical(&model, x).unwrap();
        let b = predict_classical(&scaled_model, &xs).unwrap();
        prop_assume!((a.d1 - a.d2).abs() > 1e-6 * (a.d1 + a.d2));
        prop_assert_eq!(a.label, b.label);
    }

    #[test]
    fn swap_estimates_ignore_global_phase(theta in 0.0f64..std::f64::consts::TAU, x in prop::collection::vec(-2.0f64..2.0, 2), seed in any::<u64>()) {
        let data = generate_crossplanes(&SynthSpec::crossplanes(6, 0.1, 1)).unwrap();
        let model = train_classical(&data, 1.0, 1.0, 0.0).unwrap();
        let s1 = model.plane1.state().unwrap();
        let s2 = model.plane2.state().unwrap();
        let config = PredictionConfig { sampling: Sampling::Shots(2000), seed };
        let a = classify(&x, &s1, &s2, &config).unwrap();
        let b = classify(&x, &s1.with_global_phase(theta), &s2.with_global_phase(-theta), &config).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn saved_model_predicts_identically() {
    let data = generate_crossplanes(&SynthSpec::crossplanes(8, 0.05, 21)).unwrap();
    let cfg = RunConfig { seed: 99, ..RunConfig::default() };
    let model = train(&data, TrainMode::QuantumSim, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    model.save(&path).unwrap();
    let loaded = ModelFile::load(&path).unwrap();
    assert_eq!(loaded, model);
    let samples: Vec<Vec<f64>> = data.labeled_rows().into_iter().map(|(_, r)| r).collect();
    for mode in [PredictMode::Classical, PredictMode::Quantum] {
        let before = predict(&model, &samples, mode, &cfg).unwrap();
        let after = predict(&loaded, &samples, mode, &cfg).unwrap();
        assert_eq!(before.len(), after.len());
        for (a, b) in before.iter().zip(&after) {
            assert_eq!(a.label, b.label);
            let bits = |r: &qtsvm::pipeline::PredictionRow| {
                let mut v: Vec<u64> = r.classical.map(|(x, y)| vec![x.to_bits(), y.to_bits()]).unwrap_or_default();
                if let Some(e) = r.quantum {
                    v.extend([e.ratio1, e.ratio2, e.i1, e.i2, e.normsq_w1, e.normsq_w2].map(f64::to_bits));
                }
                v
            };
            assert_eq!(bits(a), bits(b));
        }
    }
}

#[test]
fn quantum_labels_track_classical_on_training_rows() {
    let data = generate_crossplanes(&SynthSpec::crossplanes(16, 0.05, 5)).unwrap();
    let cfg = RunConfig { sampling: Sampling::Exact, ..RunConfig::default() };
    let model = train(&data, TrainMode::QuantumSim, &cfg).unwrap();
    let samples: Vec<Vec<f64>> = data.labeled_rows().into_iter().map(|(_, r)| r).collect();
    let quantum = predict(&model, &samples, PredictMode::Quantum, &cfg).unwrap();
    let classical = predict(&model, &samples, PredictMode::Classical, &cfg).unwrap();
    let agree = quantum.iter().zip(&classical).filter(|(q, c)| q.label == c.label).count();
    assert_eq!(agree, samples.len());
    assert!(classical.iter().any(|r| r.label == Label::Positive));
}
