//! Batch front end: scenario files and presets, runs with selected checks,
//! parameter sweeps and single-state analysis. Reports are written as JSON
//! and CSV; FLAG verdicts are findings and never an error.

pub mod config;
pub mod run;
pub mod sweep;

pub use config::{
    load_config, parse_scenario, preset, InitialField, Noise, ScenarioConfig, PRESETS,
};
pub use run::{
    analyze_command, evaluate_check, run_command, run_scenario, AnalyzeSummary, Check,
    CheckSummary, Format, OutputOptions, RunConfig, RunSummary,
};
pub use sweep::{load_sweep, sweep_command, Cell, SweepGrid, SweepRow, SweepSummary};
