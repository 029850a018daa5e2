//! JSON run configuration.
//!
//! ```json
//! { "model": "three-b", "parameterization": "physical",
//!   "params": { "n_atoms": 100, "coupling_g": 1, "cavity_kappa": 1,
//!               "gamma_21": 1, "gamma_02": 2, "gamma_10": 0.1 },
//!   "integrator": { "t_max": 500 } }
//! ```

use std::path::Path;

use lasekit::dynamics::IntegratorConfig;
use lasekit::model::{expand_scheme_a, expand_scheme_b, expand_two, reduce_three, reduce_two};
use lasekit::steady::PumpModel;
use lasekit::{
    DimensionlessSchemeA, DimensionlessSchemeB, DimensionlessTwoLevel, PhysicalThreeLevel, PhysicalTwoLevel, Scheme,
};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    TwoLevel,
    ThreeA,
    ThreeB,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::TwoLevel => "two-level",
            ModelKind::ThreeA => "three-a",
            ModelKind::ThreeB => "three-b",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "two-level" => Some(ModelKind::TwoLevel),
            "three-a" => Some(ModelKind::ThreeA),
            "three-b" => Some(ModelKind::ThreeB),
            _ => None,
        }
    }

    fn scheme(&self) -> Scheme {
        match self {
            ModelKind::ThreeB => Scheme::B,
            _ => Scheme::A,
        }
    }
}

/// A fully validated parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Params {
    PhysicalTwo(PhysicalTwoLevel),
    PhysicalThree(PhysicalThreeLevel),
    /// Reduced parameters; `pump` is the relative pump, when given.
    Dimensionless {
        model: PumpModel,
        pump: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: ModelKind,
    pub params: Params,
    pub integrator: IntegratorConfig,
}

const TWO_PHYSICAL: &[&str] = &["n_atoms", "coupling_g", "cavity_kappa", "gamma_decay", "pump_rate"];
const THREE_PHYSICAL: &[&str] = &["n_atoms", "coupling_g", "cavity_kappa", "gamma_21", "gamma_02", "gamma_10"];
const TWO_REDUCED: &[&str] = &["lambda", "s", "delta"];
const THREE_REDUCED: &[&str] = &["lambda", "s", "eps", "delta"];
const INTEGRATOR_KEYS: &[&str] = &["rel_tol", "abs_tol", "max_step", "t_max", "steady_tol"];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let root: Value = serde_json::from_str(text).map_err(|e| CliError::config(format!("invalid JSON: {e}")))?;
        let root = root.as_object().ok_or_else(|| CliError::config("top level must be a JSON object"))?;
        check_keys("", root, &["model", "parameterization", "params"], &["integrator"])?;

        let kind = string(root, "model")?;
        let kind = ModelKind::parse(kind).ok_or_else(|| {
            CliError::config(format!("model: expected one of two-level, three-a, three-b, got `{kind}`"))
        })?;
        let physical = match string(root, "parameterization")? {
            "physical" => true,
            "dimensionless" => false,
            other => {
                return Err(CliError::config(format!(
                    "parameterization: expected physical or dimensionless, got `{other}`"
                )))
            }
        };
        let params = root["params"].as_object().ok_or_else(|| CliError::config("params: expected an object"))?;
        let params = parse_params(kind, physical, params)?;

        let mut integrator = IntegratorConfig::default();
        if let Some(v) = root.get("integrator") {
            let obj = v.as_object().ok_or_else(|| CliError::config("integrator: expected an object"))?;
            check_keys("integrator.", obj, &[], INTEGRATOR_KEYS)?;
            let get = |k: &str| number_opt("integrator.", obj, k);
            integrator.rel_tol = get("rel_tol")?.unwrap_or(integrator.rel_tol);
            integrator.abs_tol = get("abs_tol")?.unwrap_or(integrator.abs_tol);
            integrator.max_step = get("max_step")?.unwrap_or(integrator.max_step);
            integrator.steady_tol = get("steady_tol")?.unwrap_or(integrator.steady_tol);
            integrator.t_max = get("t_max")?.or(integrator.t_max);
            integrator.validate()?;
        }
        Ok(Self { kind, params, integrator })
    }

    pub fn is_physical(&self) -> bool {
        !matches!(self.params, Params::Dimensionless { .. })
    }

    pub fn parameterization(&self) -> &'static str {
        if self.is_physical() {
            "physical"
        } else {
            "dimensionless"
        }
    }

    /// Reduced model and relative pump (`None` when a dimensionless config
    /// carries no pump).
    pub fn reduced(&self) -> Result<(PumpModel, Option<f64>), CliError> {
        Ok(match self.params {
            Params::PhysicalTwo(p) => {
                let (d, pump) = reduce_two(&p)?;
                (PumpModel::TwoLevel(d), Some(pump))
            }
            Params::PhysicalThree(p) => {
                let (d, pump) = reduce_three(&p)?;
                (PumpModel::from_three(d), Some(pump))
            }
            Params::Dimensionless { model, pump } => (model, pump),
        })
    }

    /// The same system at relative pump `pump`. Physical configs rescale the
    /// pumping rate against the model's reference rate.
    pub fn with_pump(&self, pump: f64) -> Result<Self, CliError> {
        if !(pump >= 0.0 && pump.is_finite()) {
            return Err(CliError::config(format!("pump: must be finite and >= 0, got {pump}")));
        }
        let params = match self.params {
            Params::PhysicalTwo(p) => Params::PhysicalTwo(PhysicalTwoLevel { pump_rate: pump * p.gamma_decay, ..p }),
            Params::PhysicalThree(p) => {
                let reference = p.reference_rate();
                if reference <= 0.0 {
                    let name = if p.scheme == Scheme::A { "gamma_02" } else { "gamma_21" };
                    return Err(CliError::config(format!("params.{name}: must be > 0 to set a relative pump")));
                }
                let q = match p.scheme {
                    Scheme::A => PhysicalThreeLevel { gamma_21: pump * reference, ..p },
                    Scheme::B => PhysicalThreeLevel { gamma_02: pump * reference, ..p },
                };
                Params::PhysicalThree(q)
            }
            Params::Dimensionless { model, .. } => Params::Dimensionless { model, pump: Some(pump) },
        };
        Ok(Self { params, ..self.clone() })
    }

    /// Physical rates for the time-domain model. Dimensionless configs are
    /// only accepted with `expand_gauge`, which picks the canonical gauge
    /// (unit reference rate and cavity loss).
    pub fn physical(&self, expand_gauge: bool) -> Result<Physical, CliError> {
        match self.params {
            Params::PhysicalTwo(p) => Ok(Physical::Two(p)),
            Params::PhysicalThree(p) => Ok(Physical::Three(p)),
            Params::Dimensionless { model, pump } => {
                if !expand_gauge {
                    return Err(CliError::config(
                        "parameterization: dynamics needs physical rates; use a physical config or pass --expand-gauge",
                    ));
                }
                let pump = pump.ok_or_else(|| CliError::config("params.pump: required (or pass --pump)"))?;
                Ok(match model {
                    PumpModel::TwoLevel(d) => Physical::Two(expand_two(&d, pump)?),
                    PumpModel::SchemeA(d) => Physical::Three(expand_scheme_a(&d, pump)?),
                    PumpModel::SchemeB(d) => Physical::Three(expand_scheme_b(&d, pump)?),
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Physical {
    Two(PhysicalTwoLevel),
    Three(PhysicalThreeLevel),
}

fn parse_params(kind: ModelKind, physical: bool, obj: &Map<String, Value>) -> Result<Params, CliError> {
    let required = match (kind, physical) {
        (ModelKind::TwoLevel, true) => TWO_PHYSICAL,
        (_, true) => THREE_PHYSICAL,
        (ModelKind::TwoLevel, false) => TWO_REDUCED,
        (_, false) => THREE_REDUCED,
    };
    let optional: &[&str] = if physical { &["gamma_ph"] } else { &["pump"] };
    check_keys("params.", obj, required, optional)
        .map_err(|e| CliError::config(format!("{} (model {}, {})", unwrap_msg(e), kind.as_str(), label(physical))))?;
    let get = |k: &str| number("params.", obj, k);
    let params = if physical {
        let gamma_ph = number_opt("params.", obj, "gamma_ph")?.unwrap_or(0.0);
        match kind {
            ModelKind::TwoLevel => Params::PhysicalTwo(PhysicalTwoLevel::new(
                get("n_atoms")?,
                get("coupling_g")?,
                get("cavity_kappa")?,
                get("gamma_decay")?,
                get("pump_rate")?,
                gamma_ph,
            )?),
            _ => Params::PhysicalThree(PhysicalThreeLevel::new(
                get("n_atoms")?,
                get("coupling_g")?,
                get("cavity_kappa")?,
                get("gamma_21")?,
                get("gamma_02")?,
                get("gamma_10")?,
                gamma_ph,
                kind.scheme(),
            )?),
        }
    } else {
        let model = match kind {
            ModelKind::TwoLevel => {
                PumpModel::TwoLevel(DimensionlessTwoLevel::new(get("lambda")?, get("s")?, get("delta")?)?)
            }
            ModelKind::ThreeA => {
                PumpModel::SchemeA(DimensionlessSchemeA::new(get("lambda")?, get("s")?, get("eps")?, get("delta")?)?)
            }
            ModelKind::ThreeB => {
                PumpModel::SchemeB(DimensionlessSchemeB::new(get("lambda")?, get("s")?, get("eps")?, get("delta")?)?)
            }
        };
        let pump = number_opt("params.", obj, "pump")?;
        if let Some(p) = pump {
            if !(p >= 0.0) {
                return Err(CliError::config(format!("params.pump: must be >= 0, got {p}")));
            }
        }
        Params::Dimensionless { model, pump }
    };
    Ok(params)
}

fn label(physical: bool) -> &'static str {
    if physical {
        "physical"
    } else {
        "dimensionless"
    }
}

fn unwrap_msg(e: CliError) -> String {
    match e {
        CliError::Config(m) => m,
        other => other.to_string(),
    }
}

fn check_keys(prefix: &str, obj: &Map<String, Value>, required: &[&str], optional: &[&str]) -> Result<(), CliError> {
    for k in required {
        if !obj.contains_key(*k) {
            return Err(CliError::config(format!("{prefix}{k}: missing required key")));
        }
    }
    for k in obj.keys() {
        if !required.contains(&k.as_str()) && !optional.contains(&k.as_str()) {
            return Err(CliError::config(format!("{prefix}{k}: unknown key")));
        }
    }
    Ok(())
}

fn string<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a str, CliError> {
    obj[key].as_str().ok_or_else(|| CliError::config(format!("{key}: expected a string")))
}

fn number(prefix: &str, obj: &Map<String, Value>, key: &str) -> Result<f64, CliError> {
    number_opt(prefix, obj, key)?.ok_or_else(|| CliError::config(format!("{prefix}{key}: missing required key")))
}

fn number_opt(prefix: &str, obj: &Map<String, Value>, key: &str) -> Result<Option<f64>, CliError> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => {
            v.as_f64().map(Some).ok_or_else(|| CliError::config(format!("{prefix}{key}: expected a number, got {v}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> String {
        match RunConfig::from_json(text) {
            Err(CliError::Config(m)) => m,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn physical_three_level() {
        let c = RunConfig::from_json(
            r#"{"model":"three-b","parameterization":"physical","params":{"n_atoms":100,"coupling_g":1,
                "cavity_kappa":1,"gamma_21":1,"gamma_02":2,"gamma_10":0.1},"integrator":{"t_max":40}}"#,
        )
        .unwrap();
        let Params::PhysicalThree(p) = c.params else { panic!() };
        assert_eq!(p.scheme, Scheme::B);
        assert_eq!(p.gamma_ph, 0.0);
        assert_eq!(c.integrator.t_max, Some(40.0));
        let (_, pump) = c.reduced().unwrap();
        assert_eq!(pump, Some(2.0));
        let Params::PhysicalThree(q) = c.with_pump(3.0).unwrap().params else { panic!() };
        assert_eq!(q.gamma_02, 3.0);
    }

    #[test]
    fn key_level_messages() {
        assert!(err(r#"{"model":"two-level","parameterization":"dimensionless","params":{"lambda":1,"s":0.1}}"#)
            .contains("params.delta: missing"));
        assert!(err(r#"{"model":"two-level","parameterization":"dimensionless","params":{"lambda":1,"s":0.1,"delta":0,"eps":1}}"#)
            .contains("params.eps: unknown key"));
        assert!(err(
            r#"{"model":"two-level","parameterization":"dimensionless","params":{"lambda":-1,"s":0.1,"delta":0}}"#
        )
        .contains("params.lambda"));
        assert!(err(
            r#"{"model":"two-level","parameterization":"dimensionless","params":{"lambda":"x","s":0.1,"delta":0}}"#
        )
        .contains("params.lambda: expected a number"));
        assert!(err(r#"{"model":"four","parameterization":"dimensionless","params":{}}"#).starts_with("model:"));
        assert!(err(r#"{"model":"three-a","parameterization":"both","params":{}}"#).starts_with("parameterization:"));
        assert!(err(r#"{"model":"three-a","parameterization":"physical"}"#).contains("params: missing"));
        assert!(err(r#"{"model":"three-a","parameterization":"physical","params":{},"extra":1}"#)
            .contains("extra: unknown"));
        assert!(err("[1,2]").contains("object"));
        assert!(err("{").contains("invalid JSON"));
    }

    #[test]
    fn dimensionless_dynamics_needs_gauge() {
        let c = RunConfig::from_json(
            r#"{"model":"two-level","parameterization":"dimensionless","params":{"lambda":50,"s":0.01,"delta":0.1,"pump":5}}"#,
        )
        .unwrap();
        assert!(matches!(c.physical(false), Err(CliError::Config(_))));
        let Physical::Two(p) = c.physical(true).unwrap() else { panic!() };
        assert_eq!(p.pump_rate, 5.0);
    }

    #[test]
    fn bad_integrator_setting() {
        let m = err(
            r#"{"model":"two-level","parameterization":"dimensionless","params":{"lambda":1,"s":0.1,"delta":0},"integrator":{"rel_tol":0}}"#,
        );
        assert!(m.contains("integrator.rel_tol"), "{m}");
    }
}
