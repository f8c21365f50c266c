//! Configuration, the run loop, snapshots and diagnostics files.

pub mod config;
pub mod diagnostics;
pub mod run;
pub mod snapshot;

pub use config::{load_config, RunConfig};
pub use run::{analyze, initial_state, phase_grid, run, Analysis, RunSummary, Simulation};
pub use snapshot::Snapshot;
