//! Experiment harness for `orgsim-core`: configuration files, the parallel
//! replicate runner, result files and the `orgsim` command line.

pub mod config;
pub mod output;
pub mod runner;

pub use config::{parse_config, ConfigError};
pub use output::{write_outputs, OutputError};
pub use runner::run_experiment;
