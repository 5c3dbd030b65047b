//! Declarative experiment runner for the DSCM link simulator: scenario
//! configs, named presets, parallel sweeps and CSV/JSON result tables.

pub mod analysis;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod runner;

pub use config::{Mode, ScenarioConfig, SkewCompensation, Sweep, Variant};
pub use error::{HarnessError, Result};
pub use output::{emit_results, parse_csv, parse_json, Format, ResultRow, CSV_HEADER};
pub use presets::{build_preset, PRESET_NAMES};
pub use runner::{run_scenario, run_scenario_with, RunOptions};
