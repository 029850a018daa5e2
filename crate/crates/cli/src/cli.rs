//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lasekit::numerics::Scale;

use crate::figures::Figure;

#[derive(Debug, Parser)]
#[command(
    name = "lasekit",
    version,
    about = "Steady states, lasing windows and time-domain runs of two- and three-level lasers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady-state photon number, populations and dephasing at one pump value.
    Steady(SteadyArgs),
    /// Threshold, lasing window and optimum pump.
    Region(RegionArgs),
    /// Photon number over a pump range, as CSV or JSON.
    Sweep(SweepArgs),
    /// Integrate the Maxwell–Bloch equations to steady state and write the trajectory.
    Dynamics(DynamicsArgs),
    /// Write the CSV curves of a figure preset.
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    Log,
    Linear,
}

impl From<ScaleArg> for Scale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Log => Scale::Log,
            ScaleArg::Linear => Scale::Linear,
        }
    }
}

#[derive(Debug, Args)]
pub struct SteadyArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Relative pump; overrides the configured one.
    #[arg(long)]
    pub pump: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub pump_min: f64,
    #[arg(long)]
    pub pump_max: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = ScaleArg::Log)]
    pub scale: ScaleArg,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Also settle the ODE at every k-th point and add its photon number.
    #[arg(long, value_name = "K")]
    pub oracle_every: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Relative pump; overrides the configured one.
    #[arg(long)]
    pub pump: Option<f64>,
    /// Accept a dimensionless config by fixing unit cavity loss and reference rate.
    #[arg(long)]
    pub expand_gauge: bool,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Initial field amplitude `x` (photon number `x²`).
    #[arg(long)]
    pub seed_field: Option<f64>,
    /// Record every k-th accepted step.
    #[arg(long, default_value_t = 1, value_name = "K")]
    pub stride: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}
