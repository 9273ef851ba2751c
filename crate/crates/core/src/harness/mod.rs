//! Experiment configuration, metrics windows and the runners behind the
//! command line.

mod config;
mod metrics;
mod run;

pub use config::{CheckConfig, ExperimentConfig, Source};
pub use metrics::{windows_to_csv, MetricsAccumulator, MetricsWindow, CSV_HEADER};
pub use run::{
    load_bank, run_check, run_eval, run_supremal, run_train, run_train_many, summary_csv, CheckReport, Completion,
    Experiment, SupremalReport, TrainOptions, TrainReport, BANK_FILE,
};
