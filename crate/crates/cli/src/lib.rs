//! Command-line front end for `lasekit`: JSON configuration, key/value
//! reports, CSV sweeps and trajectories, and the figure presets.

pub mod cli;
pub mod commands;
pub mod config;
pub mod emit;
pub mod error;
pub mod figures;
pub mod format;
pub mod report;

pub use cli::Cli;
pub use commands::run;
pub use error::CliError;
pub use format::FloatFormat;
