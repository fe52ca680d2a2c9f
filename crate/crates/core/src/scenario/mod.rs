//! Built-in scenarios, config parsing and the run driver behind the CLI.

mod config;
mod run;

pub use config::{check, validate_config, IntegrateSettings, QuantumSettings, RunConfig, Scenario};
pub use run::{
    oscillation_period, run_scenario, sha256_hex, OutputFile, RunManifest, CHAOS_MAX_LAG, DRIFT_MAX,
    ENSEMBLE_GRID, ENSEMBLE_T_MAX, FINAL_WINDOW, NORM_DRIFT_MAX, PURITY_GRID, PURITY_SLACK, SINGULARITY_MULTIPLE,
    SINGULARITY_STEP,
};
