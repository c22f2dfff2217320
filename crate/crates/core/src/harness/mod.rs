//! Configuration-driven experiments: single runs, sweeps, output files and figure presets.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{ExperimentConfig, Numerics, Sweep, SweepParam};
pub use presets::{preset, Preset, PRESET_NAMES};
pub use run::{run_single, run_sweep, scan, RunNumerics, RunOutput, SweepRow};
