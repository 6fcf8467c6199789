//! Experiment harness: declarative configs, figure presets, the sweep
//! runner, CSV/SVG emission, and empirical bound verification.

mod config;
mod presets;
mod report;
mod runner;
mod verify;

pub use config::{DistributedCompare, ExperimentConfig};
pub use presets::{preset_configs, preset_names};
pub use report::{emit_csv, emit_svg, parse_csv, write_csv, write_svg, ChartField};
pub use runner::{run_experiment, ExperimentReport, ResultRow};
pub use verify::{verify_bounds, CheckOutcome, VerifyOptions, VerifyReport};
