//! Scenario configuration, sweeps and CSV output used by the command-line front end.

pub mod config;
pub mod scenarios;
pub mod table;

pub use config::{Scenario, SweepConfig};
pub use scenarios::{
    run, run_crossing, run_delta_d, run_keyrate, run_oracle_check, run_witness_curve, DeltaDReport, RatioPair,
    ScenarioOutput,
};
pub use table::{emit_csv, read_csv, write_csv, SweepRow, SweepTable};
