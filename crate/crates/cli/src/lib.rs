//! Experiment harness: run a sketch over seeded workloads, score it against
//! the exact oracle, and write per-seed metrics.

pub mod config;
pub mod experiment;
pub mod output;

pub use config::{Algo, ExperimentConfig, Workload};
pub use experiment::{aggregate, run_experiment, run_trial, MetricsRow, Quantiles, Summary};
pub use output::{read_rows, write_rows, OutputFormat};
