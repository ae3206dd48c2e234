//! Instance I/O, experiment orchestration and report emission for the
//! stochastic vertex cover toolkit; everything the `svc` binary does is
//! exposed here so tests can drive it directly.

pub mod config;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod report;

pub use error::{CliError, Result};
