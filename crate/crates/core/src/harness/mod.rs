//! Monte-Carlo evaluation: configuration, trial engine, Eb/N0 sweeps,
//! phase-transition experiments, the worked-example check and CSV output.

pub mod config;
pub mod engine;
pub mod example;
pub mod output;
pub mod phase;
pub mod sweep;

pub use config::{preset, preset_names, Codebook, ExperimentConfig, Scheme};
pub use engine::{Experiment, PointResult, TrialRecord};
pub use example::{verify_example, verify_superposition, ExampleReport};
pub use output::{config_hash, write_csv, CSV_HEADER};
pub use phase::{phase_transition, PhaseCell, PhaseConfig};
pub use sweep::{bisect, sweep_grid, wilson_interval, BisectionOutcome, BisectionResult, SweepRow};
