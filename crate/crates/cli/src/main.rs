use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qtsvm::datagen::{GeneratingPlane, SynthSpec};
use qtsvm::hhl::{Evolution, T0Policy};
use qtsvm::pipeline::{self, ErrorSweep, PredictMode, RunConfig, TrainMode, SEED_ENV};
use qtsvm::swap::Sampling;
use qtsvm::{Error, Result};

/// Least-squares twin SVM: closed-form training and a statevector simulation
/// of quantum training and SWAP-test prediction.
#[derive(Debug, Parser)]
#[command(name = "qtsvm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a model from a labelled CSV dataset and write it as JSON.
    Train {
        /// Dataset CSV (`label` column of +1/-1, then features).
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value_t = TrainArg::Classical)]
        mode: TrainArg,
        #[arg(long, default_value = "model.json")]
        output: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Label samples with a trained model; writes CSV.
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// Samples CSV; a leading `label` column is ignored.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, value_enum, default_value_t = PredictArg::Classical)]
        mode: PredictArg,
        /// Output CSV; standard output when absent.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare classical and simulated quantum labels; writes a JSON report.
    Compare {
        #[arg(long)]
        data: PathBuf,
        /// Evaluation points; the training rows when absent.
        #[arg(long)]
        samples: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Trotter, clock-resolution and shot-noise sweeps written as CSV tables.
    ErrorReport {
        #[arg(long)]
        data: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "error_report")]
        output: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = ErrorSweep::default().trotter_steps)]
        sweep_trotter: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = ErrorSweep::default().clock_qubits)]
        sweep_clock: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = ErrorSweep::default().shots)]
        sweep_shots: Vec<u64>,
        #[arg(long, default_value_t = ErrorSweep::default().shot_seeds)]
        shot_seeds: u64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Generate a synthetic two-plane dataset as CSV.
    Datagen {
        /// Samples in the positive class.
        #[arg(long, default_value_t = 32)]
        m1: usize,
        /// Samples in the negative class.
        #[arg(long, default_value_t = 32)]
        m2: usize,
        /// First plane as `normal_0,...,normal_{n-1},offset`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = vec![1.0, -1.0, 1.0])]
        plane1: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = vec![1.0, 1.0, 1.0])]
        plane2: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        sigma: f64,
        /// Half-width of the sampling box.
        #[arg(long, default_value_t = 1.0)]
        spread: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TrainArg {
    Classical,
    QuantumSim,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PredictArg {
    Classical,
    Quantum,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    #[arg(long, default_value_t = 1.0)]
    c2: f64,
    #[arg(long, default_value_t = 0.0)]
    ridge: f64,
    #[arg(long, default_value_t = pipeline::config::DEFAULT_CLOCK_QUBITS)]
    clock_qubits: usize,
    /// Evolution time; chosen so that lambda_max * t0 = pi when absent.
    #[arg(long)]
    t0: Option<f64>,
    /// Trotter steps per application of exp(i H t0).
    #[arg(long, conflicts_with = "exact_evolution")]
    trotter_steps: Option<usize>,
    /// Exact matrix exponentials (the default).
    #[arg(long)]
    exact_evolution: bool,
    #[arg(long, default_value_t = pipeline::config::DEFAULT_SHOTS, conflicts_with = "exact_probabilities")]
    shots: u64,
    /// Use exact outcome probabilities instead of sampled shots.
    #[arg(long)]
    exact_probabilities: bool,
    /// Falls back to the QTSVM_SEED environment variable, then a fixed default.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = pipeline::DEFAULT_MAX_QUBITS)]
    max_qubits: usize,
}

fn env_seed(explicit: Option<u64>) -> Result<u64> {
    pipeline::resolve_seed(explicit, std::env::var(SEED_ENV).ok().as_deref())
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let config = RunConfig {
            c1: self.c1,
            c2: self.c2,
            ridge: self.ridge,
            clock_qubits: self.clock_qubits,
            t0: self.t0.map_or(T0Policy::Auto, T0Policy::Explicit),
            evolution: match self.trotter_steps {
                Some(steps) if !self.exact_evolution => Evolution::Trotter { steps },
                _ => Evolution::Exact,
            },
            sampling: if self.exact_probabilities { Sampling::Exact } else { Sampling::Shots(self.shots) },
            seed: env_seed(self.seed)?,
            max_qubits: self.max_qubits,
        };
        config.validate()?;
        Ok(config)
    }
}

fn output_writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn plane(values: &[f64]) -> Result<GeneratingPlane> {
    match values.split_last() {
        Some((offset, normal)) if !normal.is_empty() => Ok(GeneratingPlane::new(normal.to_vec(), *offset)),
        _ => Err(Error::InvalidSpec("a plane needs at least one normal component and an offset".into())),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { data, mode, output, run } => {
            let mode = match mode {
                TrainArg::Classical => TrainMode::Classical,
                TrainArg::QuantumSim => TrainMode::QuantumSim,
            };
            let model = pipeline::cmd_train(&data, mode, &run.config()?, &output)?;
            eprintln!("wrote {}", output.display());
            if let Some(q) = &model.quantum {
                eprintln!("fidelity vs classical: {:.6} (first), {:.6} (second)", q.fidelity1, q.fidelity2);
            }
        }
        Command::Predict { model, samples, mode, output, run } => {
            let mode = match mode {
                PredictArg::Classical => PredictMode::Classical,
                PredictArg::Quantum => PredictMode::Quantum,
            };
            let rows = pipeline::cmd_predict(&model, &samples, mode, &run.config()?)?;
            pipeline::write_predictions(output_writer(output.as_deref())?, &rows, mode)?;
        }
        Command::Compare { data, samples, output, run } => {
            let report = pipeline::cmd_compare(&data, samples.as_deref(), &run.config()?)?;
            let mut out = output_writer(output.as_deref())?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
        }
        Command::ErrorReport { data, output, sweep_trotter, sweep_clock, sweep_shots, shot_seeds, run } => {
            let sweep = ErrorSweep { trotter_steps: sweep_trotter, clock_qubits: sweep_clock, shots: sweep_shots, shot_seeds };
            let report = pipeline::cmd_error_report(&data, &sweep, &run.config()?, &output)?;
            print!("{}", report.summary());
        }
        Command::Datagen { m1, m2, plane1, plane2, sigma, spread, seed, output } => {
            let plane1 = plane(&plane1)?;
            let plane2 = plane(&plane2)?;
            let spec = SynthSpec { n: plane1.normal.len(), m1, m2, plane1, plane2, noise_sigma: sigma, spread, seed: env_seed(seed)? };
            match output {
                Some(path) => {
                    pipeline::cmd_datagen(&spec, &path)?;
                }
                None => pipeline::write_dataset(io::stdout().lock(), &qtsvm::datagen::generate_crossplanes(&spec)?)?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
