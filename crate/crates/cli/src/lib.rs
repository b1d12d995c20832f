//! Configuration, orchestration and file formats for the `pfdtd` binary.

pub mod config;
pub mod error;
pub mod run;
pub mod timeseries;
pub mod voxel;

pub use config::{
    load_config, parse_config, DriveChoice, InitialChoice, MaterialSpec, RunConfig, SystemChoice, VoxelFormat,
};
pub use error::CliError;
pub use run::{build_materials, cfl_for, run_experiment, RunReport, Summary, SystemRun, SystemSummary};
pub use timeseries::{read_timeseries_csv, write_timeseries_csv, TimeSeriesRow};
