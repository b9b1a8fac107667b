//! Configuration, Monte Carlo experiments and result output.

pub mod config;
pub mod report;
pub mod runs;
pub mod stats;

pub use config::{parse_config, ConfigError, Experiment, ExperimentConfig};
pub use report::{emit_results, ResultRow, ResultTable, Status};
pub use runs::{run_experiment, ExperimentError};
