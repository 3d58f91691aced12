//! Harness around the `dovetail` sorters: a reference oracle, timed and
//! verified runs, the benchmark grid with CSV output, structural work checks
//! and a graph-transpose demo.

pub mod grid;
pub mod oracle;
pub mod run;
pub mod theory;
pub mod transpose;

pub use grid::{run_grid, BenchOptions, Preset, RunResult, CSV_HEADER};
pub use oracle::merge_sort_by_key;
pub use run::{oracle_sorted, verify, Algo, VerifyError};
