//! Configuration parsing and the plain-text output formats.

mod config;
mod output;

pub use config::{centred_origin, parse_config, parse_rotor_config, EngineChoice, ScenarioConfig};
pub use output::{
    read_snapshot, write_output_dir, write_report, write_snapshot, write_timeseries, SnapshotHeader, SNAPSHOT_MAGIC,
};
