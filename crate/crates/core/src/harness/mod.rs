//! Scenario files, sweeps and output.
//!
//! A [`Scenario`] fixes a configuration, a phase design, an optional sweep
//! axis, the trial count and the seed. [`run_scenario`] evaluates one
//! [`ResultRow`] per sweep point; [`save_run`] writes the rows as CSV or
//! JSON with a `.manifest.json` sidecar from which the run can be repeated.

mod config_file;
mod output;
mod reproduce;
mod scenario;

pub use config_file::{load_scenario, parse_power, parse_scenario};
pub use output::{
    manifest_path, read_csv, save_run, write_csv, write_manifest, write_rows, Format, Manifest,
    CSV_HEADER, SCHEMA_VERSION,
};
pub use reproduce::{
    antennas_for_snr, power_scaling_table, reproduce, tradeoff_table, PowerScalingRow,
    ReproduceOptions, TradeoffRow, DESIGN_SWEEP_N, FIGURES, POWER_SCALING_EU, POWER_SCALING_M,
    POWER_SCALING_N, RATE_SWEEP_N, TRADEOFF_N, TRADEOFF_SNR,
};
pub use scenario::{
    farthest_user, nearest_user, resolve_design, run_scenario, run_single, PhaseDesign,
    ResolvedPhase, ResultRow, Scenario, Sweep, SweepAxis, DEFAULT_TRIALS,
};
