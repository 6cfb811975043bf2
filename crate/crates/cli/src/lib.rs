//! Experiment harness for convergence studies of lifted-path numerics, plus
//! the `roughpath` command line on top of it.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

pub use cli::run_cli;
pub use config::{ExperimentConfig, PathSpec};
pub use error::CliError;
pub use experiments::{
    rate_function, run_experiment, stratonovich_sum, EnergyInput,
};
pub use report::{fit_loglog, Aggregate, MetricRow, RateReport, SlopeFit};
