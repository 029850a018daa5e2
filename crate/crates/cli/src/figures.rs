//! Figure presets: fixed parameter families swept over a fixed pump range.

use clap::ValueEnum;
use lasekit::numerics::{sweep, Scale, SweepSeries};
use lasekit::steady::PumpModel;
use lasekit::{DimensionlessSchemeA, DimensionlessSchemeB, DimensionlessTwoLevel};

use crate::emit::sweep_csv;
use crate::error::CliError;
use crate::format::FloatFormat;

pub const FIGURE_POINTS: usize = 400;
/// Lowest pump on any figure axis.
pub const PUMP_FLOOR: f64 = 1e-2;
/// Upper pump for curves whose lasing window never closes.
pub const UNBOUNDED_PUMP_MAX: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    /// Two-level photon number for three saturation parameters.
    Fig2,
    /// Scheme A photon number for three saturation parameters.
    Fig4a,
    /// Scheme B photon number for three saturation parameters.
    Fig4b,
}

impl Figure {
    pub fn name(&self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
        }
    }

    pub fn models(&self) -> Vec<PumpModel> {
        match self {
            Figure::Fig2 => [7e-7, 1e-6, 1.33e-6]
                .map(|s| PumpModel::TwoLevel(DimensionlessTwoLevel { lambda: 1e3, s, delta: 1e5 }))
                .to_vec(),
            Figure::Fig4a => [0.0, 0.2, 0.5]
                .map(|s| PumpModel::SchemeA(DimensionlessSchemeA { lambda: 1e6, s, eps: 0.01, delta: 0.0 }))
                .to_vec(),
            Figure::Fig4b => [0.1, 0.02, 0.01]
                .map(|s| PumpModel::SchemeB(DimensionlessSchemeB { lambda: 1e5, s, eps: 0.0, delta: 0.1 }))
                .to_vec(),
        }
    }

    pub fn file_name(&self, curve: usize) -> String {
        format!("{}_curve{curve}.csv", self.name())
    }

    /// The sweeps behind the figure, one per curve.
    pub fn curves(&self) -> Result<Vec<SweepSeries>, CliError> {
        self.models()
            .iter()
            .map(|m| {
                let (lo, hi) = pump_range(m)?;
                Ok(sweep(m, lo, hi, FIGURE_POINTS, Scale::Log)?)
            })
            .collect()
    }

    /// `(file name, contents)` for every curve.
    pub fn render(&self, f: &FloatFormat) -> Result<Vec<(String, String)>, CliError> {
        let curves = self.curves()?;
        Ok(curves
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let k = i + 1;
                let meta = [("figure".to_string(), self.name().to_string()), ("curve".to_string(), k.to_string())];
                (self.file_name(k), sweep_csv(s, &meta, f))
            })
            .collect())
    }
}

/// `[max(floor, P_thr/2), 1.2 · upper edge]`, or up to [`UNBOUNDED_PUMP_MAX`]
/// when the window is unbounded.
pub fn pump_range(model: &PumpModel) -> Result<(f64, f64), CliError> {
    let w = model.window().ok_or_else(|| CliError::config(format!("figure preset {model:?} does not lase")))?;
    let lo = PUMP_FLOOR.max(0.5 * w.lower);
    let hi = if w.upper.is_finite() { 1.2 * w.upper } else { UNBOUNDED_PUMP_MAX };
    Ok((lo, hi))
}
