//! Command-line experiment runner for `compgap`.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{parse_config, ConfigError, ExperimentConfig};
pub use experiments::{run, CliError, Experiment, Report, Row};
