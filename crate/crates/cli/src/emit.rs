//! CSV emission and parsing.
//!
//! Every file starts with `# key=value` metadata lines, then a header, then
//! data rows. Dynamics files end with `#` footer lines carrying the settle
//! classification.

use std::fmt::Write as _;

use lasekit::dynamics::{IntegratorConfig, Traced};
use lasekit::numerics::{Scale, SweepSeries};
use lasekit::steady::PumpModel;
use lasekit::{
    BlochState2, BlochState3, DimensionlessSchemeA, DimensionlessSchemeB, DimensionlessTwoLevel, DynamicsError, Regime,
};

use crate::format::FloatFormat;

pub const SWEEP_HEADER: &str = "pump,photon_number,regime";
/// Extra column for the ODE-settled photon number at checked points.
pub const ORACLE_COLUMN: &str = "ode_photon_number";
/// Oracle cell for a lasing fixed point the trajectory cannot settle on.
pub const UNSTABLE: &str = "unstable";

pub type Meta = Vec<(String, String)>;

/// Metadata describing a reduced model, in a fixed order.
pub fn model_meta(model: &PumpModel, f: &FloatFormat) -> Meta {
    let mut meta = vec![("model".to_string(), model.id().to_string())];
    meta.extend(model.parameters().into_iter().map(|(k, v)| (k.to_string(), f.fmt(v))));
    meta
}

fn write_meta(out: &mut String, meta: &[(String, String)]) {
    for (k, v) in meta {
        let _ = writeln!(out, "# {k}={v}");
    }
}

pub fn sweep_csv(series: &SweepSeries, extra_meta: &[(String, String)], f: &FloatFormat) -> String {
    let mut out = String::new();
    write_meta(&mut out, extra_meta);
    write_meta(&mut out, &model_meta(&series.model, f));
    let n = series.pump_values.len();
    write_meta(
        &mut out,
        &[
            ("scale".into(), series.scale.as_str().into()),
            ("points".into(), n.to_string()),
            ("pump_min".into(), f.fmt(series.pump_values[0])),
            ("pump_max".into(), f.fmt(series.pump_values[n - 1])),
        ],
    );
    let with_oracle = !series.oracle.is_empty();
    out.push_str(SWEEP_HEADER);
    if with_oracle {
        let _ = write!(out, ",{ORACLE_COLUMN}");
    }
    out.push('\n');
    let mut checked = series.oracle.iter().peekable();
    for i in 0..n {
        let _ = write!(
            out,
            "{},{},{}",
            f.fmt(series.pump_values[i]),
            f.fmt(series.photon_numbers[i]),
            series.regime_flags[i].as_str()
        );
        if with_oracle {
            out.push(',');
            if let Some(&(_, v)) = checked.next_if(|(k, _)| *k == i) {
                out.push_str(&v.map_or(UNSTABLE.to_string(), |x| f.fmt(x)));
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn perr(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, msg: msg.into() }
}

/// Parses the metadata block of any emitted CSV.
pub fn read_meta(text: &str) -> Meta {
    text.lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| l.trim_start_matches('#').trim().split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Inverse of [`sweep_csv`] with shortest formatting.
pub fn read_sweep(text: &str) -> Result<SweepSeries, ParseError> {
    let meta = read_meta(text);
    let get = |k: &str| -> Result<f64, ParseError> {
        let v = meta.iter().find(|(key, _)| key == k).ok_or_else(|| perr(0, format!("missing metadata `{k}`")))?;
        v.1.parse().map_err(|_| perr(0, format!("metadata `{k}` is not a number")))
    };
    let id = meta.iter().find(|(k, _)| k == "model").map(|(_, v)| v.as_str());
    let model = match id {
        Some("two-level") => {
            PumpModel::TwoLevel(DimensionlessTwoLevel { lambda: get("lambda")?, s: get("s")?, delta: get("delta")? })
        }
        Some("three-a") => PumpModel::SchemeA(DimensionlessSchemeA {
            lambda: get("lambda")?,
            s: get("s")?,
            eps: get("eps")?,
            delta: get("delta")?,
        }),
        Some("three-b") => PumpModel::SchemeB(DimensionlessSchemeB {
            lambda: get("lambda")?,
            s: get("s")?,
            eps: get("eps")?,
            delta: get("delta")?,
        }),
        _ => return Err(perr(0, "missing or unknown `model` metadata")),
    };
    let scale = match meta.iter().find(|(k, _)| k == "scale").map(|(_, v)| v.as_str()) {
        Some("log") => Scale::Log,
        Some("linear") => Scale::Linear,
        _ => return Err(perr(0, "missing or unknown `scale` metadata")),
    };

    let mut lines = text.lines().enumerate().skip_while(|(_, l)| l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| perr(0, "missing header"))?;
    let with_oracle = if header == SWEEP_HEADER {
        false
    } else if header == format!("{SWEEP_HEADER},{ORACLE_COLUMN}") {
        true
    } else {
        return Err(perr(hline + 1, format!("unexpected header `{header}`")));
    };
    let mut series = SweepSeries {
        model,
        scale,
        pump_values: Vec::new(),
        photon_numbers: Vec::new(),
        regime_flags: Vec::new(),
        oracle: Vec::new(),
    };
    for (idx, line) in lines {
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| perr(idx + 1, format!("not a number: `{s}`")));
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 3 + with_oracle as usize {
            return Err(perr(idx + 1, "wrong number of fields"));
        }
        let i = series.pump_values.len();
        series.pump_values.push(num(cells[0])?);
        series.photon_numbers.push(num(cells[1])?);
        series.regime_flags.push(Regime::parse(cells[2]).ok_or_else(|| perr(idx + 1, "unknown regime"))?);
        if with_oracle {
            match cells[3] {
                "" => {}
                UNSTABLE => series.oracle.push((i, None)),
                v => series.oracle.push((i, Some(num(v)?))),
            }
        }
    }
    Ok(series)
}

/// One time-series row; implemented for both state types.
pub trait StateRow {
    const HEADER: &'static str;
    fn row(&self, f: &FloatFormat) -> String;
    /// Field amplitude `x`.
    fn field(&self) -> f64;
}

impl StateRow for BlochState2 {
    const HEADER: &'static str = "t,rho11,y,x,n";
    fn row(&self, f: &FloatFormat) -> String {
        format!("{},{},{},{}", f.fmt(self.rho11), f.fmt(self.y), f.fmt(self.x), f.fmt(self.photon_number()))
    }
    fn field(&self) -> f64 {
        self.x
    }
}

impl StateRow for BlochState3 {
    const HEADER: &'static str = "t,rho11,rho22,y,x,n";
    fn row(&self, f: &FloatFormat) -> String {
        format!(
            "{},{},{},{},{}",
            f.fmt(self.rho11),
            f.fmt(self.rho22),
            f.fmt(self.y),
            f.fmt(self.x),
            f.fmt(self.photon_number())
        )
    }
    fn field(&self) -> f64 {
        self.x
    }
}

pub fn integrator_meta(cfg: &IntegratorConfig, t_max: f64, f: &FloatFormat) -> Meta {
    vec![
        ("rel_tol".into(), f.fmt(cfg.rel_tol)),
        ("abs_tol".into(), f.fmt(cfg.abs_tol)),
        ("max_step".into(), f.fmt(cfg.max_step)),
        ("steady_tol".into(), f.fmt(cfg.steady_tol)),
        ("t_max".into(), f.fmt(t_max)),
    ]
}

pub fn dynamics_csv<S: StateRow>(traced: &Traced<S>, meta: &[(String, String)], f: &FloatFormat) -> String {
    let mut out = String::new();
    write_meta(&mut out, meta);
    out.push_str(S::HEADER);
    out.push('\n');
    for (t, s) in traced.series.times.iter().zip(&traced.series.states) {
        let _ = writeln!(out, "{},{}", f.fmt(*t), s.row(f));
    }
    let footer: Meta = match &traced.steady {
        Ok(r) => vec![
            ("settle".into(), "converged".into()),
            ("regime".into(), r.regime.as_str().into()),
            ("photon_number".into(), f.fmt(r.photon_number)),
            ("raw_bracket".into(), f.fmt(r.raw_bracket)),
        ],
        Err(DynamicsError::NoConvergence { t, residual, photon_number, .. }) => vec![
            ("settle".into(), "no_convergence".into()),
            ("t_end".into(), f.fmt(*t)),
            ("residual".into(), f.fmt(*residual)),
            ("photon_number".into(), f.fmt(*photon_number)),
        ],
        Err(e) => vec![("settle".into(), format!("error: {e}"))],
    };
    write_meta(&mut out, &footer);
    out
}

/// Footer metadata of a dynamics CSV (the `#` lines after the data).
pub fn read_footer(text: &str) -> Meta {
    let tail: Vec<&str> = text.lines().rev().take_while(|l| l.starts_with('#')).collect();
    tail.into_iter()
        .rev()
        .filter_map(|l| l.trim_start_matches('#').trim().split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
