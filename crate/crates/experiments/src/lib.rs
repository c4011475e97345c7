//! Experiment harness: synthetic instances, solver pipelines and parameter
//! sweeps that write CSV.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod stats;
pub mod sweep;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use pipeline::{make_instance, run_pipeline, Instance, Pipeline, ResultRow, COLUMNS};
