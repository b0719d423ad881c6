//! Batch harness around the relay-chain numerics: config parsing,
//! experiment execution, CSV/metadata output, presets, and a self-check
//! battery.

pub mod config;
pub mod output;
pub mod preset;
pub mod run;
pub mod validate;

pub use config::{parse_config, ExperimentConfig, ExperimentKind, HarnessError};
pub use run::{run_experiment, Curve, Row};
