//! Snapshot files, diagnostics tables and run configuration.

pub mod config;
pub mod csv;
pub mod snapshot;

pub use config::{InitKind, RunConfig, ScheduleSpec};
pub use csv::{diagnostics_csv, write_diagnostics_csv, CsvTable, COLUMNS};
pub use snapshot::{read_snapshot, write_snapshot, LoadedSnapshot, Snapshot};
