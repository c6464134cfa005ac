//! Batch front-end: experiment configs in, CSV series and JSON summaries out.

pub mod config;
pub mod run;
pub mod snapshot;

pub use config::{
    Command, ExperimentConfig, Family, InitialState, Overrides, Preset, SnapshotFormat,
};
pub use run::{initial_terms, run, state_from_terms, Check, ExitStatus, RunReport, VERIFY_TIMES};
pub use snapshot::{read_snapshots, SnapshotFile, SnapshotWriter};
