//! Closed-form steady states.
//!
//! Every photon-number expression is a ratio whose sign is decided by a
//! polynomial in the relative pump: linear for scheme A, quadratic for the
//! two-level model and scheme B. Thresholds and window edges are the exact
//! real roots of those polynomials. The asymptotic forms that hold only in
//! the strong-coupling limit are reported next to the exact ones.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::model::{
    gamma_perp_three, reduce_three, DimensionlessSchemeA, DimensionlessSchemeB, DimensionlessThreeLevel,
    DimensionlessTwoLevel, PhysicalThreeLevel, PhysicalTwoLevel, Regime, Scheme, SteadyResult,
};
use crate::numerics;

/// Pump interval with positive steady-state photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LasingWindow {
    pub lower: f64,
    /// `+∞` when the window is unbounded.
    pub upper: f64,
    /// True for exact roots, false for an asymptotic closed form.
    pub exact: bool,
}

impl LasingWindow {
    pub fn contains(&self, pump: f64) -> bool {
        pump > self.lower && pump < self.upper
    }

    fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Exact window together with the closed-form approximations that go with it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub exact: LasingWindow,
    pub asymptotic: LasingWindow,
    /// Necessary (not sufficient) pump restriction, two-level model only.
    pub necessary: Option<LasingWindow>,
    /// `|asymptotic.upper − exact.upper| / exact.upper`; 0 when both are infinite.
    pub upper_relative_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremumReport {
    /// Closed-form optimum pump.
    pub p_paper: f64,
    /// Numerically maximized pump over the exact window.
    pub p_exact: f64,
    pub n_at_exact: f64,
    pub n_at_paper: f64,
    /// `|p_paper − p_exact| / p_exact`.
    pub discrepancy: f64,
    /// Strong-coupling estimate of the maximum photon number, when one exists.
    pub n_max_asymptotic: Option<f64>,
}

/// Coefficients of `a·P² + b·P + c`.
#[derive(Debug, Clone, Copy)]
struct Quadratic {
    a: f64,
    b: f64,
    c: f64,
}

impl Quadratic {
    #[cfg(test)]
    fn eval(&self, p: f64) -> f64 {
        (self.a * p + self.b) * p + self.c
    }

    /// Ascending real roots. Uses `q = −(b + sign(b)√disc)/2`, roots `q/a`
    /// and `c/q`, so the small root does not suffer cancellation when `|a| ≪ 1`.
    fn roots(&self) -> Option<(f64, f64)> {
        let Quadratic { a, b, c } = *self;
        if a == 0.0 {
            if b == 0.0 {
                return None;
            }
            let r = -c / b;
            return Some((r, r));
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        if q == 0.0 {
            return Some((0.0, 0.0));
        }
        let (r1, r2) = (q / a, c / q);
        Some(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
    }

    /// Window where a downward parabola (or rising line) is positive.
    fn positive_window(&self) -> Option<LasingWindow> {
        if self.a == 0.0 {
            if self.b <= 0.0 {
                return None;
            }
            return Some(LasingWindow { lower: (-self.c / self.b).max(0.0), upper: f64::INFINITY, exact: true });
        }
        debug_assert!(self.a < 0.0);
        let (lo, hi) = self.roots()?;
        if !(hi > lo) || hi <= 0.0 {
            return None;
        }
        Some(LasingWindow { lower: lo.max(0.0), upper: hi, exact: true })
    }
}

fn relative_error(approx: f64, exact: f64) -> f64 {
    if approx.is_infinite() && exact.is_infinite() {
        0.0
    } else {
        ((approx - exact) / exact).abs()
    }
}

fn classify(raw: f64, pump: f64, window: Option<LasingWindow>) -> Regime {
    if raw > 0.0 {
        Regime::Lasing
    } else {
        match window {
            Some(w) if w.upper.is_finite() && pump > w.midpoint() => Regime::AboveUpperBound,
            _ => Regime::BelowThreshold,
        }
    }
}

/// Steady populations with no intracavity field, `[ρ00, ρ11, ρ22]`.
pub(crate) fn no_field_populations(g21: f64, g02: f64, g10: f64) -> Vec<f64> {
    let w = [g10 * g21, g02 * g21, g02 * g10];
    let sum: f64 = w.iter().sum();
    if sum > 0.0 {
        return w.iter().map(|v| v / sum).collect();
    }
    // Only one rate (or none) active: population parks where nothing drains it.
    if g02 > 0.0 {
        vec![0.0, 0.0, 1.0]
    } else if g21 > 0.0 && g10 == 0.0 {
        vec![0.0, 1.0, 0.0]
    } else {
        vec![1.0, 0.0, 0.0]
    }
}

/// Populations on the lasing branch where the inversion `ρ11 − ρ00` is
/// clamped at `clamped`.
fn lasing_populations_three(g21: f64, g02: f64, clamped: f64) -> Vec<f64> {
    let rho00 = g21 * (1.0 - clamped) / (g02 + 2.0 * g21);
    let rho11 = rho00 + clamped;
    vec![rho00, rho11, 1.0 - rho00 - rho11]
}

// ---------------------------------------------------------------------------
// Two-level model
// ---------------------------------------------------------------------------

fn two_level_quadratic(s: f64, delta: f64) -> Quadratic {
    // P − 1 − s(P + 1)(P + 1 + δ)
    Quadratic { a: -s, b: 1.0 - s * (2.0 + delta), c: -1.0 - s * (1.0 + delta) }
}

/// `P − 1 − (P + 1)(P + 1 + δ)s`, the signed bracket of the photon number.
pub fn raw_two_level(d: &DimensionlessTwoLevel, pump: f64) -> f64 {
    pump - 1.0 - (pump + 1.0) * (pump + 1.0 + d.delta) * d.s
}

/// Steady state of the two-level laser with pump-dependent dephasing.
/// `gamma_perp` is in units of `γ`.
pub fn n_two_level(d: &DimensionlessTwoLevel, pump: f64) -> SteadyResult {
    let raw = raw_two_level(d, pump);
    let regime = classify(raw, pump, two_level_quadratic(d.s, d.delta).positive_window());
    let gamma_perp = 0.5 * (pump + 1.0 + d.delta);
    let rho11 = if raw > 0.0 { 0.5 * (1.0 + d.s * (pump + 1.0 + d.delta)) } else { pump / (pump + 1.0) };
    SteadyResult {
        photon_number: d.lambda * raw.max(0.0),
        regime,
        populations: vec![1.0 - rho11, rho11],
        gamma_perp,
        raw_bracket: raw,
    }
}

/// [`n_two_level`] for a physical rate set. `raw_bracket` is the unclamped
/// photon number and `gamma_perp` is in the input rate unit.
pub fn n_two_physical(p: &PhysicalTwoLevel) -> Result<SteadyResult, ModelError> {
    let (d, pump) = crate::model::reduce_two(p)?;
    let mut r = n_two_level(&d, pump);
    r.raw_bracket *= d.lambda;
    r.gamma_perp *= p.gamma_decay;
    Ok(r)
}

/// Physical two-level steady state at fixed `γ⊥` (no pump dependence):
/// `n = (Nγ/4κ)[P − 1 − (P + 1)κγ⊥/Ng²]`.
pub fn n_two_level_fixed_dephasing(p: &PhysicalTwoLevel, gamma_perp: f64) -> f64 {
    let pump = p.relative_pump();
    let sat = p.cavity_kappa * gamma_perp / (p.n_atoms * p.coupling_g * p.coupling_g);
    p.n_atoms * p.gamma_decay / (4.0 * p.cavity_kappa) * (pump - 1.0 - (pump + 1.0) * sat)
}

/// Lower window edge. `None` when no pump rate lases.
pub fn threshold_two(d: &DimensionlessTwoLevel) -> Option<f64> {
    two_level_quadratic(d.s, d.delta).positive_window().map(|w| w.lower)
}

pub fn window_two(d: &DimensionlessTwoLevel) -> Option<WindowReport> {
    let exact = two_level_quadratic(d.s, d.delta).positive_window()?;
    let inv_s = 1.0 / d.s;
    let asymptotic = LasingWindow { lower: 1.0, upper: inv_s - d.delta - 3.0, exact: false };
    let necessary = LasingWindow { lower: 1.0, upper: inv_s - 1.0 - d.delta, exact: false };
    Some(WindowReport {
        exact,
        asymptotic,
        necessary: Some(necessary),
        upper_relative_error: relative_error(asymptotic.upper, exact.upper),
    })
}

fn maximize_over(window: &LasingWindow, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let tol = 1e-12 * window.upper.max(1.0);
    numerics::maximize(f, window.lower, window.upper, tol).expect("window has positive width")
}

/// Optimum pump of the two-level laser. The bracket is an exact parabola, so
/// the closed-form vertex and the numerical maximizer agree.
pub fn optimum_two(d: &DimensionlessTwoLevel) -> Option<ExtremumReport> {
    let window = window_two(d)?.exact;
    if !window.upper.is_finite() {
        return None;
    }
    let n = |p: f64| n_two_level(d, p).photon_number;
    let p_paper = 0.5 / d.s - 1.0 - 0.5 * d.delta;
    let (p_exact, n_at_exact) = maximize_over(&window, n);
    Some(ExtremumReport {
        p_paper,
        p_exact,
        n_at_exact,
        n_at_paper: n(p_paper),
        discrepancy: relative_error(p_paper, p_exact),
        n_max_asymptotic: Some(d.lambda / (4.0 * d.s)),
    })
}

// ---------------------------------------------------------------------------
// Three-level model, physical rates
// ---------------------------------------------------------------------------

/// Unclamped three-level photon number
/// `(N/2κ)γ21(γ02 − γ10)/(γ02 + 2γ21) − (γ⊥/2g²)(γ02γ21 + γ02γ10 + γ21γ10)/(γ02 + 2γ21)`.
pub fn raw_three_physical(p: &PhysicalThreeLevel) -> Result<f64, ModelError> {
    let denom = p.gamma_02 + 2.0 * p.gamma_21;
    if denom <= 0.0 {
        return Err(ModelError::Degenerate("gamma_02 + 2 gamma_21 must be > 0"));
    }
    let gain = p.n_atoms / (2.0 * p.cavity_kappa) * p.gamma_21 * (p.gamma_02 - p.gamma_10) / denom;
    let loss = gamma_perp_three(p) / (2.0 * p.coupling_g * p.coupling_g) * p.rate_sum() / denom;
    Ok(gain - loss)
}

/// Valid for either scheme; `p.scheme` only affects the regime label.
pub fn n_three_physical(p: &PhysicalThreeLevel) -> Result<SteadyResult, ModelError> {
    let raw = raw_three_physical(p)?;
    let gamma_perp = gamma_perp_three(p);
    let regime = match reduce_three(p) {
        Ok((DimensionlessThreeLevel::A(_), _)) => classify(raw, 0.0, None),
        Ok((DimensionlessThreeLevel::B(b), pump)) => classify(raw, pump, scheme_b_quadratic(&b).positive_window()),
        Err(_) => classify(raw, 0.0, None),
    };
    let populations = if raw > 0.0 {
        let clamped = p.cavity_kappa * gamma_perp / (p.n_atoms * p.coupling_g * p.coupling_g);
        lasing_populations_three(p.gamma_21, p.gamma_02, clamped)
    } else {
        no_field_populations(p.gamma_21, p.gamma_02, p.gamma_10)
    };
    Ok(SteadyResult { photon_number: raw.max(0.0), regime, populations, gamma_perp, raw_bracket: raw })
}

/// The same photon number written as `Nγ∥Δ/4κ − γ⊥γ∥/4g²`.
pub fn n_three_decomposed(p: &PhysicalThreeLevel) -> Result<f64, ModelError> {
    let (gamma_par, inversion) = crate::model::gamma_parallel_and_inversion(p)?;
    let g2 = p.coupling_g * p.coupling_g;
    Ok(p.n_atoms * gamma_par * inversion / (4.0 * p.cavity_kappa) - gamma_perp_three(p) * gamma_par / (4.0 * g2))
}

/// Minimum atom number for scheme-A lasing,
/// `(κγ02/2g²)(1 + ε₁ + δ₁)(1 + ε₁)/(1 − ε₁)`. `None` when `ε₁ ≥ 1`.
pub fn n_min_atoms(p: &PhysicalThreeLevel) -> Option<f64> {
    if p.gamma_02 <= 0.0 {
        return None;
    }
    let eps = p.gamma_10 / p.gamma_02;
    let delta = p.gamma_ph / p.gamma_02;
    if eps >= 1.0 {
        return None;
    }
    let scale = p.cavity_kappa * p.gamma_02 / (2.0 * p.coupling_g * p.coupling_g);
    Some(scale * (1.0 + eps + delta) * (1.0 + eps) / (1.0 - eps))
}

/// Allowed range of the lower-level depletion ratio `γ02/γ10` in scheme A,
/// from the exact saturation bound. It has the same quadratic form as the
/// two-level pump window with `s → κγ10/2Ng²` and `δ → γ_ph/γ10`.
/// `None` when `γ10 = 0` or no ratio lases.
pub fn depletion_window_scheme_a(p: &PhysicalThreeLevel) -> Option<WindowReport> {
    if p.gamma_10 <= 0.0 {
        return None;
    }
    let sigma = p.cavity_kappa * p.gamma_10 / (2.0 * p.n_atoms * p.coupling_g * p.coupling_g);
    window_two(&DimensionlessTwoLevel { lambda: 1.0, s: sigma, delta: p.gamma_ph / p.gamma_10 }).map(|mut w| {
        w.necessary = None;
        w
    })
}

// ---------------------------------------------------------------------------
// Scheme A (pump does not touch the lower lasing level)
// ---------------------------------------------------------------------------

/// `[P₁(1 − ε₁) − s₁(1 + ε₁ + δ₁)(P₁(1 + ε₁) + ε₁)] / (1 + 2P₁)`.
pub fn raw_scheme_a(d: &DimensionlessSchemeA, pump: f64) -> f64 {
    let c = 1.0 + d.eps + d.delta;
    (pump * (1.0 - d.eps) - d.s * c * (pump * (1.0 + d.eps) + d.eps)) / (1.0 + 2.0 * pump)
}

/// `gamma_perp` is in units of `γ02`.
pub fn n_scheme_a(d: &DimensionlessSchemeA, pump: f64) -> SteadyResult {
    let raw = raw_scheme_a(d, pump);
    let c = 1.0 + d.eps + d.delta;
    let populations =
        if raw > 0.0 { lasing_populations_three(pump, 1.0, d.s * c) } else { no_field_populations(pump, 1.0, d.eps) };
    SteadyResult {
        photon_number: d.lambda * raw.max(0.0),
        regime: classify(raw, pump, None),
        populations,
        gamma_perp: 0.5 * c,
        raw_bracket: raw,
    }
}

/// `ε₁s₁(1 + ε₁ + δ₁) / [1 − ε₁ − s₁(1 + ε₁ + δ₁)(1 + ε₁)]`, or `None` when
/// `ε₁ ≥ 1` or the saturation bound on `s₁` is violated.
pub fn threshold_scheme_a(d: &DimensionlessSchemeA) -> Option<f64> {
    let c = 1.0 + d.eps + d.delta;
    let slope = 1.0 - d.eps - d.s * c * (1.0 + d.eps);
    if d.eps >= 1.0 || slope <= 0.0 {
        return None;
    }
    Some(d.eps * d.s * c / slope)
}

/// Scheme-A window: from threshold to unbounded pump.
pub fn window_scheme_a(d: &DimensionlessSchemeA) -> Option<LasingWindow> {
    threshold_scheme_a(d).map(|lower| LasingWindow { lower, upper: f64::INFINITY, exact: true })
}

/// Photon number approached as `P₁ → ∞`: `λ₁[(1 − ε₁) − s₁(1 + ε₁ + δ₁)(1 + ε₁)]/2`.
/// May be negative, meaning no lasing at any pump.
pub fn asymptote_scheme_a(d: &DimensionlessSchemeA) -> f64 {
    let c = 1.0 + d.eps + d.delta;
    0.5 * d.lambda * ((1.0 - d.eps) - d.s * c * (1.0 + d.eps))
}

// ---------------------------------------------------------------------------
// Scheme B (pump empties the lower lasing level)
// ---------------------------------------------------------------------------

fn scheme_b_quadratic(d: &DimensionlessSchemeB) -> Quadratic {
    // P − ε − s(P + ε + δ)(P(1 + ε) + ε)
    let (s, e, dl) = (d.s, d.eps, d.delta);
    Quadratic { a: -s * (1.0 + e), b: 1.0 - s * (e + (e + dl) * (1.0 + e)), c: -e - s * e * (e + dl) }
}

/// Numerator `P₂ − ε₂ − s₂(P₂ + ε₂ + δ₂)(P₂ + ε₂ + P₂ε₂)` without the
/// `(P₂ + 2)` denominator.
pub fn numerator_scheme_b(d: &DimensionlessSchemeB, pump: f64) -> f64 {
    pump - d.eps - d.s * (pump + d.eps + d.delta) * (pump + d.eps + pump * d.eps)
}

pub fn raw_scheme_b(d: &DimensionlessSchemeB, pump: f64) -> f64 {
    numerator_scheme_b(d, pump) / (pump + 2.0)
}

/// `gamma_perp` is in units of `γ21`.
pub fn n_scheme_b(d: &DimensionlessSchemeB, pump: f64) -> SteadyResult {
    let raw = raw_scheme_b(d, pump);
    let populations = if raw > 0.0 {
        lasing_populations_three(1.0, pump, d.s * (d.eps + pump + d.delta))
    } else {
        no_field_populations(1.0, pump, d.eps)
    };
    SteadyResult {
        photon_number: d.lambda * raw.max(0.0),
        regime: classify(raw, pump, scheme_b_quadratic(d).positive_window()),
        populations,
        gamma_perp: 0.5 * (d.eps + pump + d.delta),
        raw_bracket: raw,
    }
}

pub fn threshold_scheme_b(d: &DimensionlessSchemeB) -> Option<f64> {
    scheme_b_quadratic(d).positive_window().map(|w| w.lower)
}

/// Exact window from the roots of the numerator, with the asymptotic
/// `(1, 1/s₂ − δ₂)` alongside.
pub fn window_scheme_b(d: &DimensionlessSchemeB) -> Option<WindowReport> {
    let exact = scheme_b_quadratic(d).positive_window()?;
    let asymptotic = LasingWindow { lower: 1.0, upper: 1.0 / d.s - d.delta, exact: false };
    Some(WindowReport {
        exact,
        asymptotic,
        necessary: None,
        upper_relative_error: relative_error(asymptotic.upper, exact.upper),
    })
}

/// Closed-form optimum `1/(2s₂) − δ₂/2 − ε₂` against the numerical maximizer
/// of the full expression, including the `(P₂ + 2)` denominator.
pub fn optimum_scheme_b(d: &DimensionlessSchemeB) -> Option<ExtremumReport> {
    let window = window_scheme_b(d)?.exact;
    if !window.upper.is_finite() {
        return None;
    }
    let n = |p: f64| n_scheme_b(d, p).photon_number;
    let p_paper = 0.5 / d.s - 0.5 * d.delta - d.eps;
    let (p_exact, n_at_exact) = maximize_over(&window, n);
    Some(ExtremumReport {
        p_paper,
        p_exact,
        n_at_exact,
        n_at_paper: n(p_paper),
        discrepancy: relative_error(p_paper, p_exact),
        n_max_asymptotic: None,
    })
}

// ---------------------------------------------------------------------------
// Uniform access for sweeps
// ---------------------------------------------------------------------------

/// A reduced model whose photon number is a function of the relative pump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PumpModel {
    TwoLevel(DimensionlessTwoLevel),
    SchemeA(DimensionlessSchemeA),
    SchemeB(DimensionlessSchemeB),
}

impl PumpModel {
    pub fn id(&self) -> &'static str {
        match self {
            PumpModel::TwoLevel(_) => "two-level",
            PumpModel::SchemeA(_) => "three-a",
            PumpModel::SchemeB(_) => "three-b",
        }
    }

    /// Named parameter values, in a fixed order.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match self {
            PumpModel::TwoLevel(d) => vec![("lambda", d.lambda), ("s", d.s), ("delta", d.delta)],
            PumpModel::SchemeA(d) => vec![("lambda", d.lambda), ("s", d.s), ("eps", d.eps), ("delta", d.delta)],
            PumpModel::SchemeB(d) => vec![("lambda", d.lambda), ("s", d.s), ("eps", d.eps), ("delta", d.delta)],
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            PumpModel::TwoLevel(d) => d.validate(),
            PumpModel::SchemeA(d) => d.validate(),
            PumpModel::SchemeB(d) => d.validate(),
        }
    }

    pub fn raw(&self, pump: f64) -> f64 {
        match self {
            PumpModel::TwoLevel(d) => raw_two_level(d, pump),
            PumpModel::SchemeA(d) => raw_scheme_a(d, pump),
            PumpModel::SchemeB(d) => raw_scheme_b(d, pump),
        }
    }

    pub fn steady(&self, pump: f64) -> SteadyResult {
        match self {
            PumpModel::TwoLevel(d) => n_two_level(d, pump),
            PumpModel::SchemeA(d) => n_scheme_a(d, pump),
            PumpModel::SchemeB(d) => n_scheme_b(d, pump),
        }
    }

    pub fn threshold(&self) -> Option<f64> {
        match self {
            PumpModel::TwoLevel(d) => threshold_two(d),
            PumpModel::SchemeA(d) => threshold_scheme_a(d),
            PumpModel::SchemeB(d) => threshold_scheme_b(d),
        }
    }

    pub fn window(&self) -> Option<LasingWindow> {
        match self {
            PumpModel::TwoLevel(d) => window_two(d).map(|w| w.exact),
            PumpModel::SchemeA(d) => window_scheme_a(d),
            PumpModel::SchemeB(d) => window_scheme_b(d).map(|w| w.exact),
        }
    }

    pub fn from_three(d: DimensionlessThreeLevel) -> Self {
        match d {
            DimensionlessThreeLevel::A(a) => PumpModel::SchemeA(a),
            DimensionlessThreeLevel::B(b) => PumpModel::SchemeB(b),
        }
    }

    pub fn scheme(&self) -> Option<Scheme> {
        match self {
            PumpModel::TwoLevel(_) => None,
            PumpModel::SchemeA(_) => Some(Scheme::A),
            PumpModel::SchemeB(_) => Some(Scheme::B),
        }
    }
}
