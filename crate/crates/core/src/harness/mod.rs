//! Configuration, initial data and scenario orchestration.

pub mod config;
pub mod initial;
pub mod scenario;

pub use config::{Experiment, InitialData, ScenarioConfig, SCHEMA_VERSION};
pub use initial::make_initial_data;
pub use scenario::{run_scenario, OutputFile, RunManifest, EXIT_BLOWUP, EXIT_INVALID_CONFIG};
