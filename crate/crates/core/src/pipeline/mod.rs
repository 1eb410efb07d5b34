//! File formats and the train / predict / compare / error-report / datagen
//! commands behind the command-line front end.

pub mod commands;
pub mod config;
pub mod io;
pub mod model;

pub use commands::{
    cmd_compare, cmd_datagen, cmd_error_report, cmd_predict, cmd_train, compare, error_report, predict, train,
    write_error_report, write_predictions, ClockRow, CompareReport, ErrorReport, ErrorSweep, PredictMode,
    PredictionRow, ShotRow, TrainMode, TIE_MARGIN,
};
pub use config::{resolve_seed, RunConfig, DEFAULT_MAX_QUBITS, SEED_ENV};
pub use io::{dataset_fingerprint, read_dataset, read_samples, write_dataset, Table};
pub use model::{ModelFile, MODEL_VERSION};
