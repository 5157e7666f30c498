//! Command-line front end: run manifests, parameter sweeps and
//! machine-readable output for the `hiercon-core` solvers.

pub mod cli;
pub mod config;
pub mod error;
pub mod number;
pub mod output;
pub mod rows;
pub mod scenarios;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
pub use rows::{CompareRow, McRow, Record, SweepRow};
pub use scenarios::{compare, replay, run, Table};
