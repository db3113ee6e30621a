//! Run orchestration, records and checks behind the `mskrylov` binary.

pub mod config;
pub mod error;
pub mod export;
pub mod presets;
pub mod record;
pub mod runner;
pub mod verify;

pub use error::{CliError, CliResult};
