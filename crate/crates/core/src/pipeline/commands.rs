use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::io::{dataset_fingerprint, read_dataset, read_samples, write_dataset};
use super::model::{encode_state, ClassicalSection, ModelFile, QuantumSection, MODEL_VERSION};
use crate::classical::{predict_classical, train_classical, Dataset, Label, Plane};
use crate::datagen::{generate_crossplanes, SynthSpec};
use crate::error::{Error, Result};
use crate::hamiltonian::{fit_slope, trotter_error_report, TrotterErrorReport};
use crate::hhl::{train_quantum, HhlConfig, QuantumTraining, RegisterWidths, TrainingReport};
use crate::quantum::{fidelity, qubits_for_dim, StateVector};
use crate::rng::child_seed;
use crate::state_prep::prepare_sample_state;
use crate::swap::{classify, swap_test, DistanceEstimates, PredictionConfig, Sampling};

/// Margin below which exact-mode label comparisons are treated as ties.
pub const TIE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    Classical,
    QuantumSim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictMode {
    Classical,
    Quantum,
}

fn quantum_section(data: &Dataset, cfg: &RunConfig, classical: &ClassicalSection) -> Result<(QuantumSection, QuantumTraining)> {
    let config = cfg.quantum();
    let trained = train_quantum(data, cfg.c1, cfg.c2, &config, cfg.seed)?;
    let fidelity1 = fidelity(&trained.state1, &classical.plane1.state()?)?;
    let fidelity2 = fidelity(&trained.state2, &classical.plane2.state()?)?;
    let section = QuantumSection {
        state1: encode_state(&trained.state1),
        state2: encode_state(&trained.state2),
        config,
        seed: cfg.seed,
        fidelity1,
        fidelity2,
        report: trained.report.clone(),
    };
    Ok((section, trained))
}

/// Trains the closed-form model and, in quantum-sim mode, the simulated states.
pub fn train(data: &Dataset, mode: TrainMode, cfg: &RunConfig) -> Result<ModelFile> {
    cfg.validate()?;
    let classical = ClassicalSection::from(&train_classical(data, cfg.c1, cfg.c2, cfg.ridge)?);
    let quantum = match mode {
        TrainMode::Classical => None,
        TrainMode::QuantumSim => Some(quantum_section(data, cfg, &classical)?.0),
    };
    Ok(ModelFile {
        version: MODEL_VERSION.into(),
        n: data.n(),
        dataset_fingerprint: dataset_fingerprint(data),
        classical,
        quantum,
    })
}

pub fn cmd_train(dataset: &Path, mode: TrainMode, cfg: &RunConfig, output: &Path) -> Result<ModelFile> {
    let model = train(&read_dataset(dataset)?, mode, cfg)?;
    model.save(output)?;
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictionRow {
    pub label: Label,
    /// Squared distances `(d1^2, d2^2)` in classical mode.
    pub classical: Option<(f64, f64)>,
    pub quantum: Option<DistanceEstimates>,
}

fn check_dimensions(model: &ModelFile, samples: &[Vec<f64>]) -> Result<()> {
    match samples.iter().find(|s| s.len() != model.n) {
        Some(bad) => Err(Error::DimensionMismatch { expected: model.n, found: bad.len() }),
        None => Ok(()),
    }
}

/// Sample `i` uses seed `child_seed(cfg.seed, i)`.
pub fn predict(model: &ModelFile, samples: &[Vec<f64>], mode: PredictMode, cfg: &RunConfig) -> Result<Vec<PredictionRow>> {
    cfg.validate()?;
    check_dimensions(model, samples)?;
    match mode {
        PredictMode::Classical => {
            let classical = model.classical.model();
            samples
                .iter()
                .map(|x| {
                    let p = predict_classical(&classical, x)?;
                    Ok(PredictionRow { label: p.label, classical: Some((p.d1 * p.d1, p.d2 * p.d2)), quantum: None })
                })
                .collect()
        }
        PredictMode::Quantum => {
            let section = model.quantum.as_ref().ok_or_else(|| {
                Error::InvalidConfig("model has no quantum section; train with the quantum-sim mode".into())
            })?;
            let required = 1 + 2 * qubits_for_dim(model.n + 1);
            if required > cfg.max_qubits {
                return Err(Error::QubitCapExceeded { required, cap: cfg.max_qubits });
            }
            let (state1, state2) = section.states()?;
            samples
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let config = PredictionConfig { sampling: cfg.sampling, seed: child_seed(cfg.seed, i as u64) };
                    let (label, estimates) = classify(x, &state1, &state2, &config)?;
                    Ok(PredictionRow { label, classical: None, quantum: Some(estimates) })
                })
                .collect()
        }
    }
}

pub fn write_predictions(writer: impl Write, rows: &[PredictionRow], mode: PredictMode) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let header: &[&str] = match mode {
        PredictMode::Classical => &["label", "d1_sq", "d2_sq"],
        PredictMode::Quantum => &["label", "ratio1", "ratio2", "i1", "i2", "normsq_w1", "normsq_w2", "margin"],
    };
    let io = |e: csv::Error| Error::Io(e.into());
    csv.write_record(header).map_err(io)?;
    for row in rows {
        let mut record = vec![format!("{:+}", row.label.as_i8())];
        if let Some((d1, d2)) = row.classical {
            record.extend([d1, d2].iter().map(f64::to_string));
        }
        if let Some(e) = row.quantum {
            record.extend([e.ratio1, e.ratio2, e.i1, e.i2, e.normsq_w1, e.normsq_w2, e.margin].iter().map(f64::to_string));
        }
        csv.write_record(&record).map_err(io)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn cmd_predict(model: &Path, samples: &Path, mode: PredictMode, cfg: &RunConfig) -> Result<Vec<PredictionRow>> {
    let model = ModelFile::load(model)?;
    predict(&model, &read_samples(samples)?.rows, mode, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub points: usize,
    pub sampling: Sampling,
    pub seed: u64,
    /// Fraction of points where the sampled quantum label equals the classical one.
    pub agreement: f64,
    /// Same comparison with exact outcome probabilities, over non-tied points.
    pub exact_agreement: f64,
    /// Points whose exact-mode ratio margin is at most [`TIE_MARGIN`].
    pub exact_ties: usize,
    pub fidelity1: f64,
    pub fidelity2: f64,
    pub classical: ClassicalSection,
    pub training: TrainingReport,
}

/// Classical versus simulated-quantum labels on `points` (the training rows by default).
pub fn compare(data: &Dataset, points: Option<&[Vec<f64>]>, cfg: &RunConfig) -> Result<CompareReport> {
    cfg.validate()?;
    let model = train(data, TrainMode::Classical, cfg)?;
    let (section, trained) = quantum_section(data, cfg, &model.classical)?;
    let rows: Vec<Vec<f64>> = match points {
        Some(p) => p.to_vec(),
        None => data.labeled_rows().into_iter().map(|(_, r)| r).collect(),
    };
    check_dimensions(&model, &rows)?;
    let classical = model.classical.model();
    let (mut agree, mut exact_agree, mut ties) = (0usize, 0usize, 0usize);
    for (i, x) in rows.iter().enumerate() {
        let expected = predict_classical(&classical, x)?.label;
        let seed = child_seed(cfg.seed, i as u64);
        let sampled = classify(x, &trained.state1, &trained.state2, &PredictionConfig { sampling: cfg.sampling, seed })?.0;
        agree += usize::from(sampled == expected);
        let (exact, estimates) = classify(x, &trained.state1, &trained.state2, &PredictionConfig { sampling: Sampling::Exact, seed })?;
        if estimates.margin <= TIE_MARGIN {
            ties += 1;
        } else {
            exact_agree += usize::from(exact == expected);
        }
    }
    let decided = rows.len() - ties;
    Ok(CompareReport {
        points: rows.len(),
        sampling: cfg.sampling,
        seed: cfg.seed,
        agreement: agree as f64 / rows.len() as f64,
        exact_agreement: if decided == 0 { 1.0 } else { exact_agree as f64 / decided as f64 },
        exact_ties: ties,
        fidelity1: section.fidelity1,
        fidelity2: section.fidelity2,
        classical: model.classical,
        training: section.report,
    })
}

pub fn cmd_compare(dataset: &Path, samples: Option<&Path>, cfg: &RunConfig) -> Result<CompareReport> {
    let data = read_dataset(dataset)?;
    let points = samples.map(read_samples).transpose()?;
    compare(&data, points.as_ref().map(|t| t.rows.as_slice()), cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSweep {
    pub trotter_steps: Vec<usize>,
    pub clock_qubits: Vec<usize>,
    pub shots: Vec<u64>,
    /// Seeds averaged per shot count.
    pub shot_seeds: u64,
}

impl Default for ErrorSweep {
    fn default() -> Self {
        Self {
            trotter_steps: vec![10, 20, 40, 80, 160, 320, 640],
            clock_qubits: vec![4, 5, 6, 7, 8, 9, 10],
            shots: vec![100, 1_000, 10_000, 100_000],
            shot_seeds: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClockRow {
    pub clock_qubits: usize,
    pub fidelity1: f64,
    pub fidelity2: f64,
    pub success1: f64,
    pub success2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShotRow {
    pub shots: u64,
    pub mean_abs_error: f64,
    pub max_abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub trotter_first: TrotterErrorReport,
    pub trotter_second: TrotterErrorReport,
    pub clock: Vec<ClockRow>,
    pub shots: Vec<ShotRow>,
    /// Slope of `log(mean_abs_error)` against `log(shots)`.
    pub shot_slope: Option<f64>,
}

impl ErrorReport {
    pub fn summary(&self) -> String {
        let slope = |s: Option<f64>| s.map_or_else(|| "n/a (terms commute)".to_string(), |v| format!("{v:.3}"));
        let mut text = String::new();
        for (name, report) in [("H1", &self.trotter_first), ("H2", &self.trotter_second)] {
            let ratios: Vec<String> = report.doubling_ratios().iter().map(|r| format!("{r:.2}")).collect();
            let _ = writeln!(
                text,
                "{name}: t0 = {:.4}, single-step error slope vs dt = {}, total-error ratio per doubling = [{}]",
                report.total_time,
                slope(report.single_step_slope),
                ratios.join(", ")
            );
        }
        for row in &self.clock {
            let _ = writeln!(
                text,
                "clock qubits {:>2}: fidelity ({:.6}, {:.6}), success probability ({:.3e}, {:.3e})",
                row.clock_qubits, row.fidelity1, row.fidelity2, row.success1, row.success2
            );
        }
        let _ = writeln!(text, "SWAP-test error slope vs shots = {}", slope(self.shot_slope));
        text
    }
}

/// Trotter error, clock-resolution and shot-noise sweeps on one dataset.
pub fn error_report(data: &Dataset, sweep: &ErrorSweep, cfg: &RunConfig) -> Result<ErrorReport> {
    cfg.validate()?;
    if sweep.trotter_steps.is_empty() || sweep.clock_qubits.is_empty() || sweep.shots.is_empty() || sweep.shot_seeds == 0 {
        return Err(Error::InvalidConfig("every sweep needs at least one value".into()));
    }
    let model = train(data, TrainMode::Classical, cfg)?;
    let mut clock = Vec::with_capacity(sweep.clock_qubits.len());
    let mut pair = None;
    for &q in &sweep.clock_qubits {
        RegisterWidths::for_dataset(data, q).check_cap(cfg.max_qubits)?;
        let point = RunConfig { clock_qubits: q, ..*cfg };
        let (section, trained) = quantum_section(data, &point, &model.classical)?;
        clock.push(ClockRow {
            clock_qubits: q,
            fidelity1: section.fidelity1,
            fidelity2: section.fidelity2,
            success1: section.report.solve_first.success_probability,
            success2: section.report.solve_second.success_probability,
        });
        pair.get_or_insert(trained.hamiltonians);
    }
    let pair = pair.expect("nonempty clock sweep");
    let trotter = |which: Plane| -> Result<TrotterErrorReport> {
        let h = pair.get(which);
        let t0 = HhlConfig::for_hamiltonian(h, cfg.clock_qubits, cfg.evolution, None)?.t0;
        trotter_error_report(h, t0, &sweep.trotter_steps)
    };
    let trotter_first = trotter(Plane::First)?;
    let trotter_second = trotter(Plane::Second)?;

    let target = model.classical.plane1.state()?;
    let (_, first_row) = data.labeled_rows().into_iter().next().expect("nonempty dataset");
    let sample: StateVector = prepare_sample_state(&first_row)?;
    let exact = target.inner(&sample)?.norm_sqr();
    let mut shots = Vec::with_capacity(sweep.shots.len());
    for &s in &sweep.shots {
        let errors = (0..sweep.shot_seeds)
            .map(|k| Ok((swap_test(&target, &sample, Sampling::Shots(s), child_seed(cfg.seed, k))?.estimate - exact).abs()))
            .collect::<Result<Vec<f64>>>()?;
        shots.push(ShotRow {
            shots: s,
            mean_abs_error: errors.iter().sum::<f64>() / errors.len() as f64,
            max_abs_error: errors.iter().copied().fold(0.0, f64::max),
        });
    }
    let points: Vec<(f64, f64)> =
        shots.iter().filter(|r| r.mean_abs_error > 0.0).map(|r| ((r.shots as f64).ln(), r.mean_abs_error.ln())).collect();
    Ok(ErrorReport { trotter_first, trotter_second, clock, shot_slope: fit_slope(&points), shots })
}

/// Writes `trotter.csv`, `clock_fidelity.csv`, `shot_error.csv` and `summary.txt`.
pub fn write_error_report(dir: &Path, report: &ErrorReport) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut trotter = String::from("hamiltonian,steps,dt,single_step_error,total_error\n");
    for (name, r) in [("H1", &report.trotter_first), ("H2", &report.trotter_second)] {
        for row in &r.rows {
            let _ = writeln!(trotter, "{name},{},{},{},{}", row.steps, row.dt, row.single_step_error, row.total_error);
        }
    }
    fs::write(dir.join("trotter.csv"), trotter)?;
    let mut clock = String::from("clock_qubits,fidelity1,fidelity2,success1,success2\n");
    for r in &report.clock {
        let _ = writeln!(clock, "{},{},{},{},{}", r.clock_qubits, r.fidelity1, r.fidelity2, r.success1, r.success2);
    }
    fs::write(dir.join("clock_fidelity.csv"), clock)?;
    let mut shots = String::from("shots,mean_abs_error,max_abs_error\n");
    for r in &report.shots {
        let _ = writeln!(shots, "{},{},{}", r.shots, r.mean_abs_error, r.max_abs_error);
    }
    fs::write(dir.join("shot_error.csv"), shots)?;
    fs::write(dir.join("summary.txt"), report.summary())?;
    Ok(())
}

pub fn cmd_error_report(dataset: &Path, sweep: &ErrorSweep, cfg: &RunConfig, output_dir: &Path) -> Result<ErrorReport> {
    let report = error_report(&read_dataset(dataset)?, sweep, cfg)?;
    write_error_report(output_dir, &report)?;
    Ok(report)
}

pub fn cmd_datagen(spec: &SynthSpec, output: &Path) -> Result<Dataset> {
    let data = generate_crossplanes(spec)?;
    write_dataset(fs::File::create(output)?, &data)?;
    Ok(data)
}
