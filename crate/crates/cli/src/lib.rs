//! Configuration ingestion, example presets and experiment orchestration for
//! the `tdcrack` command-line tool.

pub mod config;
pub mod experiment;

pub use config::{ConfigError, CrackSpec, ExperimentConfig, OutputKind};
pub use experiment::{compute, preset, run_experiment, Experiment, RatioResult, RunError};
