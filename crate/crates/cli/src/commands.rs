//! Subcommand implementations. Each returns its output text; [`run`] routes
//! it to a file or to the given writer.

use std::io::Write;
use std::path::Path;

use lasekit::dynamics::{
    default_initial_three, default_initial_two, settle_traced, BlochModel, IntegratorConfig, Traced,
};
use lasekit::model::{gamma_parallel_and_inversion, reduce_three};
use lasekit::numerics::{sweep, sweep_with_oracle, SweepSeries};
use lasekit::steady::{
    asymptote_scheme_a, depletion_window_scheme_a, n_min_atoms, n_three_physical, n_two_physical, optimum_scheme_b,
    optimum_two, window_scheme_b, window_two, PumpModel, WindowReport,
};
use lasekit::{DynamicsError, PhysicalThreeLevel, Scheme};
use serde_json::{json, Value};

use crate::cli::{Cli, Command, DynamicsArgs, Format, SweepArgs};
use crate::config::{Params, Physical, RunConfig};
use crate::emit::{dynamics_csv, integrator_meta, sweep_csv, Meta, StateRow};
use crate::error::CliError;
use crate::format::FloatFormat;
use crate::report::{json_number, Report};

pub fn run(cli: &Cli, f: &FloatFormat, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Steady(a) => {
            let cfg = RunConfig::load(&a.config)?;
            let r = steady_report(&cfg, a.pump)?;
            write_stdout(stdout, &render(&r, a.format, f))
        }
        Command::Region(a) => {
            let cfg = RunConfig::load(&a.config)?;
            let r = region_report(&cfg)?;
            write_stdout(stdout, &render(&r, a.format, f))
        }
        Command::Sweep(a) => {
            let cfg = RunConfig::load(&a.config)?;
            let text = sweep_text(&cfg, a, f)?;
            deliver(a.out.as_deref(), &text, stdout)
        }
        Command::Dynamics(a) => {
            let cfg = RunConfig::load(&a.config)?;
            let text = dynamics_text(&cfg, a, f)?;
            deliver(a.out.as_deref(), &text, stdout)
        }
        Command::Figure(a) => {
            for (name, text) in a.figure.render(f)? {
                let path = a.out.join(&name);
                write_file(&path, &text)?;
                write_stdout(stdout, &format!("{}\n", path.display()))?;
            }
            Ok(())
        }
    }
}

fn render(r: &Report, format: Format, f: &FloatFormat) -> String {
    match format {
        Format::Csv => r.to_csv(f),
        Format::Json => r.to_json(f),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn write_stdout(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

fn deliver(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text),
        None => write_stdout(stdout, text),
    }
}

fn header(r: &mut Report, cfg: &RunConfig) {
    r.text("model", cfg.kind.as_str()).text("parameterization", cfg.parameterization());
}

/// Photon number, regime, raw bracket, dephasing and populations. Three-level
/// reports add the longitudinal rate and the equilibrium inversion. Rates are
/// in the config's units (the reference rate for dimensionless configs).
pub fn steady_report(cfg: &RunConfig, pump: Option<f64>) -> Result<Report, CliError> {
    let cfg = match pump {
        Some(p) => cfg.with_pump(p)?,
        None => cfg.clone(),
    };
    let (_, rel_pump) = cfg.reduced()?;
    let rel_pump = rel_pump.ok_or_else(|| CliError::config("params.pump: required (or pass --pump)"))?;
    let (res, rates) = match cfg.params {
        Params::PhysicalTwo(p) => (n_two_physical(&p)?, None),
        Params::PhysicalThree(p) => (n_three_physical(&p)?, Some(p)),
        Params::Dimensionless { model, .. } => {
            let rates = match model {
                PumpModel::TwoLevel(_) => None,
                PumpModel::SchemeA(d) => Some(unit_rates(Scheme::A, rel_pump, 1.0, d.eps)),
                PumpModel::SchemeB(d) => Some(unit_rates(Scheme::B, 1.0, rel_pump, d.eps)),
            };
            (model.steady(rel_pump), rates)
        }
    };
    let mut r = Report::new();
    header(&mut r, &cfg);
    r.num("pump", rel_pump)
        .num("photon_number", res.photon_number)
        .text("regime", res.regime.as_str())
        .num("raw_bracket", res.raw_bracket)
        .num("gamma_perp", res.gamma_perp);
    for (k, v) in ["rho00", "rho11", "rho22"].iter().zip(&res.populations) {
        r.num(k, *v);
    }
    if let Some(p) = rates {
        let (gamma_par, inversion) = gamma_parallel_and_inversion(&p)?;
        r.num("gamma_parallel", gamma_par).num("inversion", inversion);
    }
    Ok(r)
}

/// Three-level rates in reference units. Only the rates matter for the
/// longitudinal rate and inversion; the field parameters are placeholders.
fn unit_rates(scheme: Scheme, gamma_21: f64, gamma_02: f64, gamma_10: f64) -> PhysicalThreeLevel {
    PhysicalThreeLevel {
        n_atoms: 1.0,
        coupling_g: 1.0,
        cavity_kappa: 1.0,
        gamma_21,
        gamma_02,
        gamma_10,
        gamma_ph: 0.0,
        scheme,
    }
}

fn window_fields(r: &mut Report, prefix: &str, w: Option<&WindowReport>) {
    r.opt(&format!("{prefix}asymptotic_lower"), w.map(|w| w.asymptotic.lower))
        .opt(&format!("{prefix}asymptotic_upper"), w.map(|w| w.asymptotic.upper))
        .opt(&format!("{prefix}asymptotic_upper_relative_error"), w.map(|w| w.upper_relative_error));
}

/// Threshold, exact and closed-form windows, the extremum comparison and,
/// for physical scheme-A configs, the atom-number floor and the allowed
/// depletion ratio `γ02/γ10`. A configuration that never lases reports
/// `outcome = no_lasing` with the model-specific fields left empty.
pub fn region_report(cfg: &RunConfig) -> Result<Report, CliError> {
    let (model, _) = cfg.reduced()?;
    let window = model.window();
    let mut r = Report::new();
    header(&mut r, cfg);
    r.text("outcome", if window.is_some() { "lasing" } else { "no_lasing" })
        .opt("threshold", model.threshold())
        .opt("window_lower", window.map(|w| w.lower))
        .opt("window_upper", window.map(|w| w.upper));
    match model {
        PumpModel::TwoLevel(d) => {
            let w = window_two(&d);
            window_fields(&mut r, "", w.as_ref());
            let nec = w.and_then(|w| w.necessary);
            r.opt("necessary_lower", nec.map(|w| w.lower)).opt("necessary_upper", nec.map(|w| w.upper));
            let opt = optimum_two(&d);
            extremum_fields(&mut r, opt);
            let approx = opt.and_then(|o| o.n_max_asymptotic);
            r.opt("n_max_asymptotic", approx).opt(
                "n_max_asymptotic_relative_error",
                opt.zip(approx).map(|(o, a)| ((a - o.n_at_exact) / o.n_at_exact).abs()),
            );
        }
        PumpModel::SchemeA(d) => {
            r.opt("photon_number_limit", window.map(|_| asymptote_scheme_a(&d)));
            let phys = match cfg.params {
                Params::PhysicalThree(p) => Some(p),
                _ => None,
            };
            r.opt("n_min_atoms", phys.and_then(|p| n_min_atoms(&p)));
            let dep = phys.and_then(|p| depletion_window_scheme_a(&p));
            r.opt("depletion_ratio_lower", dep.map(|w| w.exact.lower))
                .opt("depletion_ratio_upper", dep.map(|w| w.exact.upper));
            window_fields(&mut r, "depletion_ratio_", dep.as_ref());
        }
        PumpModel::SchemeB(d) => {
            window_fields(&mut r, "", window_scheme_b(&d).as_ref());
            extremum_fields(&mut r, optimum_scheme_b(&d));
        }
    }
    if let Params::PhysicalThree(p) = cfg.params {
        // The configured pump, for locating the operating point in the window.
        r.num("pump", reduce_three(&p)?.1);
    } else if let Some(p) = cfg.reduced()?.1 {
        r.num("pump", p);
    }
    Ok(r)
}

fn extremum_fields(r: &mut Report, e: Option<lasekit::steady::ExtremumReport>) {
    r.opt("optimum_pump_paper", e.map(|e| e.p_paper))
        .opt("optimum_pump_exact", e.map(|e| e.p_exact))
        .opt("photon_number_at_paper", e.map(|e| e.n_at_paper))
        .opt("photon_number_at_exact", e.map(|e| e.n_at_exact))
        .opt("optimum_discrepancy", e.map(|e| e.discrepancy));
}

/// Metadata naming the configuration a sweep or trajectory came from.
fn config_meta(cfg: &RunConfig, f: &FloatFormat) -> Meta {
    let mut meta = vec![("parameterization".to_string(), cfg.parameterization().to_string())];
    let physical: Vec<(&str, f64)> = match cfg.params {
        Params::PhysicalTwo(p) => vec![
            ("n_atoms", p.n_atoms),
            ("coupling_g", p.coupling_g),
            ("cavity_kappa", p.cavity_kappa),
            ("gamma_decay", p.gamma_decay),
            ("pump_rate", p.pump_rate),
            ("gamma_ph", p.gamma_ph),
        ],
        Params::PhysicalThree(p) => three_rates(&p),
        Params::Dimensionless { .. } => Vec::new(),
    };
    meta.extend(physical.into_iter().map(|(k, v)| (k.to_string(), f.fmt(v))));
    meta
}

fn three_rates(p: &PhysicalThreeLevel) -> Vec<(&'static str, f64)> {
    vec![
        ("n_atoms", p.n_atoms),
        ("coupling_g", p.coupling_g),
        ("cavity_kappa", p.cavity_kappa),
        ("gamma_21", p.gamma_21),
        ("gamma_02", p.gamma_02),
        ("gamma_10", p.gamma_10),
        ("gamma_ph", p.gamma_ph),
    ]
}

pub fn sweep_series(cfg: &RunConfig, a: &SweepArgs) -> Result<SweepSeries, CliError> {
    let (model, _) = cfg.reduced()?;
    Ok(match a.oracle_every {
        None => sweep(&model, a.pump_min, a.pump_max, a.points, a.scale.into())?,
        Some(0) => return Err(CliError::config("--oracle-every: must be >= 1")),
        Some(k) => sweep_with_oracle(&model, a.pump_min, a.pump_max, a.points, a.scale.into(), k, &cfg.integrator)?,
    })
}

fn sweep_text(cfg: &RunConfig, a: &SweepArgs, f: &FloatFormat) -> Result<String, CliError> {
    let series = sweep_series(cfg, a)?;
    Ok(match a.format {
        Format::Csv => sweep_csv(&series, &config_meta(cfg, f), f),
        Format::Json => {
            let params: serde_json::Map<String, Value> =
                series.model.parameters().into_iter().map(|(k, v)| (k.to_string(), json_number(v, f))).collect();
            let oracle: std::collections::HashMap<usize, Option<f64>> = series.oracle.iter().copied().collect();
            let points: Vec<Value> = (0..series.pump_values.len())
                .map(|i| {
                    let mut row = json!({
                        "pump": json_number(series.pump_values[i], f),
                        "photon_number": json_number(series.photon_numbers[i], f),
                        "regime": series.regime_flags[i].as_str(),
                    });
                    if let Some(v) = oracle.get(&i) {
                        row["ode_photon_number"] = v.map_or(Value::String("unstable".into()), |x| json_number(x, f));
                    }
                    row
                })
                .collect();
            let doc = json!({
                "model": series.model.id(),
                "parameterization": cfg.parameterization(),
                "parameters": params,
                "scale": series.scale.as_str(),
                "points": points,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("sweep serializes");
            s.push('\n');
            s
        }
    })
}

/// Settled trajectory of a dynamics run: the CSV text and the settle outcome.
pub fn dynamics_text(cfg: &RunConfig, a: &DynamicsArgs, f: &FloatFormat) -> Result<String, CliError> {
    let cfg = match a.pump {
        Some(p) => cfg.with_pump(p)?,
        None => cfg.clone(),
    };
    let mut integ = cfg.integrator;
    if let Some(t) = a.t_max {
        integ.t_max = Some(t);
    }
    integ.validate()?;
    if let Some(x) = a.seed_field {
        if !x.is_finite() {
            return Err(CliError::config(format!("--seed-field: must be finite, got {x}")));
        }
    }
    let mut meta: Meta = vec![("command".into(), "dynamics".into()), ("model".into(), cfg.kind.as_str().into())];
    if !cfg.is_physical() {
        meta.push(("gauge".into(), "cavity_kappa=1, reference rate=1".into()));
    }
    match cfg.physical(a.expand_gauge)? {
        Physical::Two(p) => {
            let mut init = default_initial_two(&p);
            if let Some(x) = a.seed_field {
                init.x = x;
            }
            meta.extend(
                [
                    ("n_atoms", p.n_atoms),
                    ("coupling_g", p.coupling_g),
                    ("cavity_kappa", p.cavity_kappa),
                    ("gamma_decay", p.gamma_decay),
                    ("pump_rate", p.pump_rate),
                    ("gamma_ph", p.gamma_ph),
                ]
                .map(|(k, v)| (k.to_string(), f.fmt(v))),
            );
            traced_csv(&p, &init, &integ, a.stride, meta, f)
        }
        Physical::Three(p) => {
            let mut init = default_initial_three(&p);
            if let Some(x) = a.seed_field {
                init.x = x;
            }
            meta.extend(three_rates(&p).into_iter().map(|(k, v)| (k.to_string(), f.fmt(v))));
            traced_csv(&p, &init, &integ, a.stride, meta, f)
        }
    }
}

fn traced_csv<M>(
    model: &M,
    init: &M::State,
    integ: &IntegratorConfig,
    stride: usize,
    mut meta: Meta,
    f: &FloatFormat,
) -> Result<String, CliError>
where
    M: BlochModel,
    M::State: StateRow,
{
    let t_max = integ.t_max.unwrap_or_else(|| model.default_t_max());
    meta.extend(integrator_meta(integ, t_max, f));
    meta.push(("seed_field".into(), f.fmt(init.field())));
    meta.push(("stride".into(), stride.to_string()));
    let traced: Traced<M::State> = settle_traced(model, init, integ, stride)?;
    if let Err(e) = &traced.steady {
        if !matches!(e, DynamicsError::NoConvergence { .. }) {
            return Err(e.clone().into());
        }
    }
    Ok(dynamics_csv(&traced, &meta, f))
}
