//! Configuration-driven runner around `quasibeam-core`: scenario files,
//! multi-engine runs with cross-engine comparison, and data artifacts.

pub mod config;
pub mod output;
pub mod runner;

pub use config::{load_scenario, ConfigError, Engine, OutputFormat, ScenarioConfig};
pub use runner::{emit_outputs, run_scenario, RunError, RunOutcome, RunReport};
