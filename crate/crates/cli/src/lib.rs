//! Experiment harness for `lrnn-memory`: config-driven commands that write CSV
//! tables, optional SVG plots, checkpoints and a run manifest.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

pub use config::{Command, ExperimentConfig};
pub use error::{CliError, CliResult};
pub use output::{Csv, RunManifest, RunWriter};
