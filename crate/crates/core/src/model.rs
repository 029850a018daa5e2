//! Parameter and state types shared by every other module.
//!
//! Physical parameter sets carry raw rates in a single common (arbitrary)
//! unit. Dimensionless sets carry the reduced groups that the closed-form
//! photon-number expressions are written in. `reduce_*` and `expand_*`
//! convert between the two; the expansion fixes the free gauge as
//! `kappa = 1` and reference rate `= 1`.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

fn check_nonneg(name: &'static str, value: f64) -> Result<(), ModelError> {
    if !value.is_finite() || value < 0.0 {
        return Err(ModelError::Invalid { name, value, requirement: "finite and >= 0" });
    }
    Ok(())
}

fn check_positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(ModelError::Invalid { name, value, requirement: "finite and > 0" });
    }
    Ok(())
}

fn check_atoms(value: f64) -> Result<(), ModelError> {
    if !value.is_finite() || value < 1.0 {
        return Err(ModelError::Invalid { name: "n_atoms", value, requirement: "finite and >= 1" });
    }
    Ok(())
}

/// Closed two-level laser: upper level 1, lower level 0, pumped 0 → 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalTwoLevel {
    pub n_atoms: f64,
    pub coupling_g: f64,
    pub cavity_kappa: f64,
    /// Spontaneous decay of the upper lasing level.
    pub gamma_decay: f64,
    /// Incoherent pump rate 0 → 1.
    pub pump_rate: f64,
    /// Collisional (pure) dephasing.
    pub gamma_ph: f64,
}

impl PhysicalTwoLevel {
    pub fn new(
        n_atoms: f64,
        coupling_g: f64,
        cavity_kappa: f64,
        gamma_decay: f64,
        pump_rate: f64,
        gamma_ph: f64,
    ) -> Result<Self, ModelError> {
        let p = Self { n_atoms, coupling_g, cavity_kappa, gamma_decay, pump_rate, gamma_ph };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        check_atoms(self.n_atoms)?;
        check_positive("coupling_g", self.coupling_g)?;
        check_positive("cavity_kappa", self.cavity_kappa)?;
        check_positive("gamma_decay", self.gamma_decay)?;
        check_nonneg("pump_rate", self.pump_rate)?;
        check_nonneg("gamma_ph", self.gamma_ph)
    }

    /// Pump relative to the upper-level decay, `P = Γ/γ`.
    pub fn relative_pump(&self) -> f64 {
        self.pump_rate / self.gamma_decay
    }
}

/// Which rate of the three-level system plays the role of the pump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// Pump 2 → 1; lower lasing level 0 drains to ground 2 (`gamma_02`).
    A,
    /// Pump 0 → 2 (`gamma_02`); level 2 relaxes into the upper lasing level.
    B,
}

/// Closed three-level laser. Lasing transition 1 → 0; the cycle is closed
/// by 0 → 2 (`gamma_02`) and 2 → 1 (`gamma_21`).
///
/// Both schemes obey identical equations; `scheme` only selects which rate
/// is treated as the pump when reducing to dimensionless form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalThreeLevel {
    pub n_atoms: f64,
    pub coupling_g: f64,
    pub cavity_kappa: f64,
    pub gamma_21: f64,
    pub gamma_02: f64,
    pub gamma_10: f64,
    pub gamma_ph: f64,
    pub scheme: Scheme,
}

impl PhysicalThreeLevel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n_atoms: f64,
        coupling_g: f64,
        cavity_kappa: f64,
        gamma_21: f64,
        gamma_02: f64,
        gamma_10: f64,
        gamma_ph: f64,
        scheme: Scheme,
    ) -> Result<Self, ModelError> {
        let p = Self { n_atoms, coupling_g, cavity_kappa, gamma_21, gamma_02, gamma_10, gamma_ph, scheme };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        check_atoms(self.n_atoms)?;
        check_positive("coupling_g", self.coupling_g)?;
        check_positive("cavity_kappa", self.cavity_kappa)?;
        check_nonneg("gamma_21", self.gamma_21)?;
        check_nonneg("gamma_02", self.gamma_02)?;
        check_nonneg("gamma_10", self.gamma_10)?;
        check_nonneg("gamma_ph", self.gamma_ph)
    }

    /// The rate every dimensionless group of the active scheme is measured in.
    pub fn reference_rate(&self) -> f64 {
        match self.scheme {
            Scheme::A => self.gamma_02,
            Scheme::B => self.gamma_21,
        }
    }

    pub fn pump_rate(&self) -> f64 {
        match self.scheme {
            Scheme::A => self.gamma_21,
            Scheme::B => self.gamma_02,
        }
    }

    pub fn with_scheme(self, scheme: Scheme) -> Self {
        Self { scheme, ..self }
    }

    /// `γ21γ02 + γ02γ10 + γ21γ10`, the symmetric rate sum that appears in
    /// both the saturation term and the equilibrium inversion.
    pub(crate) fn rate_sum(&self) -> f64 {
        self.gamma_21 * self.gamma_02 + self.gamma_02 * self.gamma_10 + self.gamma_21 * self.gamma_10
    }
}

/// Reduced two-level parameters: `λ = Nγ/4κ`, `s = κγ/2Ng²`, `δ = γ_ph/γ`.
///
/// `s = 0` is accepted as the lossless-coherence limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessTwoLevel {
    pub lambda: f64,
    pub s: f64,
    pub delta: f64,
}

impl DimensionlessTwoLevel {
    pub fn new(lambda: f64, s: f64, delta: f64) -> Result<Self, ModelError> {
        let d = Self { lambda, s, delta };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        check_positive("lambda", self.lambda)?;
        check_nonneg("s", self.s)?;
        check_nonneg("delta", self.delta)
    }
}

/// Reduced scheme-A parameters, all rates measured in `γ02`:
/// `λ₁ = Nγ02/2κ`, `s₁ = κγ02/2Ng²`, `ε₁ = γ10/γ02`, `δ₁ = γ_ph/γ02`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessSchemeA {
    pub lambda: f64,
    pub s: f64,
    pub eps: f64,
    pub delta: f64,
}

/// Reduced scheme-B parameters, all rates measured in `γ21`:
/// `λ₂ = Nγ21/2κ`, `s₂ = κγ21/2Ng²`, `ε₂ = γ10/γ21`, `δ₂ = γ_ph/γ21`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessSchemeB {
    pub lambda: f64,
    pub s: f64,
    pub eps: f64,
    pub delta: f64,
}

macro_rules! three_level_reduced_impl {
    ($ty:ident) => {
        impl $ty {
            pub fn new(lambda: f64, s: f64, eps: f64, delta: f64) -> Result<Self, ModelError> {
                let d = Self { lambda, s, eps, delta };
                d.validate()?;
                Ok(d)
            }

            pub fn validate(&self) -> Result<(), ModelError> {
                check_positive("lambda", self.lambda)?;
                check_nonneg("s", self.s)?;
                check_nonneg("eps", self.eps)?;
                check_nonneg("delta", self.delta)
            }
        }
    };
}

three_level_reduced_impl!(DimensionlessSchemeA);
three_level_reduced_impl!(DimensionlessSchemeB);

/// Phase-reduced two-level state. `y` is the lasing coherence quadrature
/// (`ρ10 = i·y`), `x` the real field amplitude with `n = x²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState2 {
    pub rho11: f64,
    pub y: f64,
    pub x: f64,
}

impl BlochState2 {
    pub fn rho00(&self) -> f64 {
        1.0 - self.rho11
    }

    pub fn photon_number(&self) -> f64 {
        self.x * self.x
    }
}

/// Phase-reduced three-level state; `ρ00 = 1 − ρ11 − ρ22`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState3 {
    pub rho11: f64,
    pub rho22: f64,
    pub y: f64,
    pub x: f64,
}

impl BlochState3 {
    pub fn rho00(&self) -> f64 {
        1.0 - self.rho11 - self.rho22
    }

    pub fn photon_number(&self) -> f64 {
        self.x * self.x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    BelowThreshold,
    Lasing,
    AboveUpperBound,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::BelowThreshold => "below_threshold",
            Regime::Lasing => "lasing",
            Regime::AboveUpperBound => "above_upper_bound",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "below_threshold" => Some(Regime::BelowThreshold),
            "lasing" => Some(Regime::Lasing),
            "above_upper_bound" => Some(Regime::AboveUpperBound),
            _ => None,
        }
    }
}

/// Steady state of one model at one pump value.
///
/// `raw_bracket` is the signed, unclamped quantity whose sign decides
/// lasing: the bracket of the reduced formula for dimensionless inputs, the
/// unclamped photon number for physical inputs. `populations` is indexed by
/// level (`[ρ00, ρ11]` or `[ρ00, ρ11, ρ22]`). `gamma_perp` is in the units
/// of the input (the reference rate for dimensionless inputs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyResult {
    pub photon_number: f64,
    pub regime: Regime,
    pub populations: Vec<f64>,
    pub gamma_perp: f64,
    pub raw_bracket: f64,
}

/// Dipole dephasing of the two-level model, `(Γ + γ + γ_ph)/2`.
pub fn gamma_perp_two(p: &PhysicalTwoLevel) -> f64 {
    0.5 * (p.pump_rate + p.gamma_decay + p.gamma_ph)
}

/// Dipole dephasing of the three-level model, `(γ10 + γ02 + γ_ph)/2`.
/// Independent of `γ21`.
pub fn gamma_perp_three(p: &PhysicalThreeLevel) -> f64 {
    0.5 * (p.gamma_10 + p.gamma_02 + p.gamma_ph)
}

pub fn reduce_two(p: &PhysicalTwoLevel) -> Result<(DimensionlessTwoLevel, f64), ModelError> {
    check_positive("gamma_decay", p.gamma_decay)?;
    let gamma = p.gamma_decay;
    let d = DimensionlessTwoLevel {
        lambda: p.n_atoms * gamma / (4.0 * p.cavity_kappa),
        s: p.cavity_kappa * gamma / (2.0 * p.n_atoms * p.coupling_g * p.coupling_g),
        delta: p.gamma_ph / gamma,
    };
    Ok((d, p.pump_rate / gamma))
}

/// Canonical physical realization of a reduced two-level point:
/// `κ = γ = 1`, `N = 4λ`, `g² = 1/(2Ns)`, `Γ = P`, `γ_ph = δ`.
pub fn expand_two(d: &DimensionlessTwoLevel, pump: f64) -> Result<PhysicalTwoLevel, ModelError> {
    d.validate()?;
    check_positive("s", d.s)?;
    let n_atoms = 4.0 * d.lambda;
    let g = (1.0 / (2.0 * n_atoms * d.s)).sqrt();
    PhysicalTwoLevel::new(n_atoms, g, 1.0, 1.0, pump, d.delta)
}

/// Reduced form of a three-level parameter set, tagged by scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DimensionlessThreeLevel {
    A(DimensionlessSchemeA),
    B(DimensionlessSchemeB),
}

/// Reduces against `γ02` (scheme A) or `γ21` (scheme B). Returns the
/// reduced parameters and the relative pump `P₁ = γ21/γ02` or `P₂ = γ02/γ21`.
pub fn reduce_three(p: &PhysicalThreeLevel) -> Result<(DimensionlessThreeLevel, f64), ModelError> {
    let reference = p.reference_rate();
    let name = match p.scheme {
        Scheme::A => "gamma_02",
        Scheme::B => "gamma_21",
    };
    check_positive(name, reference)?;
    let lambda = p.n_atoms * reference / (2.0 * p.cavity_kappa);
    let s = p.cavity_kappa * reference / (2.0 * p.n_atoms * p.coupling_g * p.coupling_g);
    let eps = p.gamma_10 / reference;
    let delta = p.gamma_ph / reference;
    let pump = p.pump_rate() / reference;
    let d = match p.scheme {
        Scheme::A => DimensionlessThreeLevel::A(DimensionlessSchemeA { lambda, s, eps, delta }),
        Scheme::B => DimensionlessThreeLevel::B(DimensionlessSchemeB { lambda, s, eps, delta }),
    };
    Ok((d, pump))
}

fn expand_three_common(
    lambda: f64,
    s: f64,
    eps: f64,
    delta: f64,
    pump: f64,
    scheme: Scheme,
) -> Result<PhysicalThreeLevel, ModelError> {
    check_positive("s", s)?;
    check_nonneg("pump", pump)?;
    let n_atoms = 2.0 * lambda;
    let g = (1.0 / (2.0 * n_atoms * s)).sqrt();
    let (gamma_21, gamma_02) = match scheme {
        Scheme::A => (pump, 1.0),
        Scheme::B => (1.0, pump),
    };
    PhysicalThreeLevel::new(n_atoms, g, 1.0, gamma_21, gamma_02, eps, delta, scheme)
}

/// Canonical realization with `κ = γ02 = 1`, `N = 2λ₁`, `g² = 1/(2Ns₁)`.
pub fn expand_scheme_a(d: &DimensionlessSchemeA, pump: f64) -> Result<PhysicalThreeLevel, ModelError> {
    d.validate()?;
    expand_three_common(d.lambda, d.s, d.eps, d.delta, pump, Scheme::A)
}

/// Canonical realization with `κ = γ21 = 1`, `N = 2λ₂`, `g² = 1/(2Ns₂)`.
pub fn expand_scheme_b(d: &DimensionlessSchemeB, pump: f64) -> Result<PhysicalThreeLevel, ModelError> {
    d.validate()?;
    expand_three_common(d.lambda, d.s, d.eps, d.delta, pump, Scheme::B)
}

/// Longitudinal relaxation rate and equilibrium (no-field) inversion of the
/// three-level system viewed as an effective two-level one:
///
/// `γ∥ = 2(γ21γ02 + γ02γ10 + γ21γ10)/(γ02 + 2γ21)`,
/// `Δ = γ21(γ02 − γ10)/(γ21γ02 + γ02γ10 + γ21γ10)`.
///
/// `Δ` is reported as 0 when the rate sum vanishes (no closed pump cycle).
pub fn gamma_parallel_and_inversion(p: &PhysicalThreeLevel) -> Result<(f64, f64), ModelError> {
    let denom = p.gamma_02 + 2.0 * p.gamma_21;
    if denom <= 0.0 {
        return Err(ModelError::Degenerate("gamma_02 + 2 gamma_21 must be > 0"));
    }
    let sum = p.rate_sum();
    let gamma_par = 2.0 * sum / denom;
    let inversion = if sum > 0.0 { p.gamma_21 * (p.gamma_02 - p.gamma_10) / sum } else { 0.0 };
    Ok((gamma_par, inversion))
}
