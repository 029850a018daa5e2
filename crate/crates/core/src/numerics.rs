//! Scalar root finding, maximization, the algebraic steady-state oracle and
//! pump sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, IntegratorConfig};
use crate::error::NumericsError;
use crate::model::{
    expand_scheme_a, expand_scheme_b, expand_two, gamma_perp_three, gamma_perp_two, PhysicalThreeLevel,
    PhysicalTwoLevel, Regime,
};
use crate::steady::PumpModel;

/// Grid size of the pre-scan that seeds golden-section search.
pub const PRESCAN_POINTS: usize = 1000;

/// An interval with function values of opposite (or zero) sign at its ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    pub fn new(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<Self, NumericsError> {
        let (f_lo, f_hi) = (f(lo), f(hi));
        let b = Bracket { lo, hi, f_lo, f_hi };
        if !(lo < hi) || !(f_lo * f_hi <= 0.0) {
            return Err(NumericsError::InvalidBracket { lo, hi, f_lo, f_hi });
        }
        Ok(b)
    }

    /// `1e-10 · max(1, |hi|)`.
    pub fn default_tol(&self) -> f64 {
        1e-10 * self.hi.abs().max(1.0)
    }
}

/// Brent's method: inverse quadratic / secant steps, falling back to
/// bisection whenever they do not shrink the bracket fast enough. The result
/// always lies inside the initial bracket.
pub fn find_root(f: impl Fn(f64) -> f64, bracket: Bracket, tol: f64) -> Result<f64, NumericsError> {
    let Bracket { lo, hi, f_lo, f_hi } = bracket;
    if !(lo < hi) || !(f_lo * f_hi <= 0.0) {
        return Err(NumericsError::InvalidBracket { lo, hi, f_lo, f_hi });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }

    let (mut a, mut b, mut fa, mut fb) = (lo, hi, f_lo, f_hi);
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);

    for _ in 0..500 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Ok(b)
}

/// Maximizes `f` on `[lo, hi]`. A uniform pre-scan of [`PRESCAN_POINTS`]
/// points picks the best cell; golden-section search then refines inside
/// the two neighbouring cells. The returned value is never below the best
/// pre-scan sample, so non-unimodal functions still get a valid answer.
pub fn maximize(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64), NumericsError> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericsError::InvalidInterval { lo, hi });
    }
    let n = PRESCAN_POINTS;
    let step = (hi - lo) / (n - 1) as f64;
    let grid_x = |i: usize| if i == n - 1 { hi } else { lo + step * i as f64 };
    let (mut best_i, mut best_f) = (0, f(lo));
    for i in 1..n {
        let v = f(grid_x(i));
        if v > best_f {
            best_i = i;
            best_f = v;
        }
    }
    let a = grid_x(best_i.saturating_sub(1));
    let b = grid_x((best_i + 1).min(n - 1));
    let (x, fx) = golden_section_max(&f, a, b, tol.max(f64::EPSILON * hi.abs().max(lo.abs())));
    if fx >= best_f {
        Ok((x, fx))
    } else {
        Ok((grid_x(best_i), best_f))
    }
}

fn golden_section_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..300 {
        if b - a <= tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Three-level steady state solved from the reduced equations themselves.
///
/// On the lasing branch `ẏ = ẋ = 0` pin the inversion at
/// `D = ρ11 − ρ00 = κγ⊥/Ng²`. With `ρ11 = ρ00 + D`, the balance `ρ̇22 = 0` and
/// normalization form a 2×2 linear system for `(ρ00, ρ22)`; `ρ̇11 = 0` then
/// gives the stimulated rate `2κn/N = γ21ρ22 − γ10ρ11`. A non-positive result
/// means the lasing branch does not exist and the photon number is 0.
pub fn algebraic_oracle_three(p: &PhysicalThreeLevel) -> Result<f64, NumericsError> {
    let clamped = p.cavity_kappa * gamma_perp_three(p) / (p.n_atoms * p.coupling_g * p.coupling_g);
    // [ γ02  −γ21 ] [ρ00]   [   0   ]
    // [  2     1  ] [ρ22] = [ 1 − D ]
    let (a11, a12, a21, a22) = (p.gamma_02, -p.gamma_21, 2.0, 1.0);
    let (r1, r2) = (0.0, 1.0 - clamped);
    let det = a11 * a22 - a12 * a21;
    if det == 0.0 {
        return Err(NumericsError::Singular("population balance needs gamma_02 + 2 gamma_21 > 0"));
    }
    let rho00 = (r1 * a22 - a12 * r2) / det;
    let rho22 = (a11 * r2 - r1 * a21) / det;
    let rho11 = rho00 + clamped;
    let stimulated = p.gamma_21 * rho22 - p.gamma_10 * rho11;
    let n = p.n_atoms * stimulated / (2.0 * p.cavity_kappa);
    Ok(n.max(0.0))
}

/// Two-level counterpart of [`algebraic_oracle_three`]: with the inversion
/// pinned at `κγ⊥/Ng²`, `2κn/N = Γρ00 − γρ11`.
pub fn algebraic_oracle_two(p: &PhysicalTwoLevel) -> f64 {
    let clamped = p.cavity_kappa * gamma_perp_two(p) / (p.n_atoms * p.coupling_g * p.coupling_g);
    let rho11 = 0.5 * (1.0 + clamped);
    let stimulated = p.pump_rate * (1.0 - rho11) - p.gamma_decay * rho11;
    (p.n_atoms * stimulated / (2.0 * p.cavity_kappa)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scale {
    Linear,
    Log,
}

impl Scale {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scale::Linear => "linear",
            Scale::Log => "log",
        }
    }
}

/// Pump grid with both endpoints reproduced exactly.
pub fn pump_grid(lo: f64, hi: f64, count: usize, scale: Scale) -> Result<Vec<f64>, NumericsError> {
    if count < 2 {
        return Err(NumericsError::TooFewPoints(count));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || (scale == Scale::Log && lo <= 0.0) {
        return Err(NumericsError::InvalidInterval { lo, hi });
    }
    let last = (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count)
        .map(|i| {
            let t = i as f64 / last;
            match scale {
                Scale::Linear => lo + t * (hi - lo),
                Scale::Log => (lo.ln() + t * (hi.ln() - lo.ln())).exp(),
            }
        })
        .collect();
    grid[0] = lo;
    grid[count - 1] = hi;
    // Log rounding can produce ties for extremely narrow ranges.
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(NumericsError::InvalidInterval { lo, hi });
    }
    Ok(grid)
}

/// Photon number against relative pump for one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSeries {
    pub model: PumpModel,
    pub scale: Scale,
    pub pump_values: Vec<f64>,
    pub photon_numbers: Vec<f64>,
    pub regime_flags: Vec<Regime>,
    /// `(index, settled photon number)` for the ODE-checked subset. `None`
    /// marks a lasing fixed point that is linearly unstable, which the
    /// trajectory never settles on.
    pub oracle: Vec<(usize, Option<f64>)>,
}

/// Evaluates the closed-form photon number on a pump grid. Points are
/// evaluated in parallel and assembled in grid order.
pub fn sweep(model: &PumpModel, lo: f64, hi: f64, count: usize, scale: Scale) -> Result<SweepSeries, NumericsError> {
    model.validate()?;
    let pump_values = pump_grid(lo, hi, count, scale)?;
    let results: Vec<_> = pump_values.par_iter().map(|&p| model.steady(p)).collect();
    Ok(SweepSeries {
        model: *model,
        scale,
        photon_numbers: results.iter().map(|r| r.photon_number).collect(),
        regime_flags: results.iter().map(|r| r.regime).collect(),
        pump_values,
        oracle: Vec::new(),
    })
}

/// Like [`sweep`], additionally settling the ODE at every `every`-th point
/// (in the canonical gauge of the reduced parameters).
pub fn sweep_with_oracle(
    model: &PumpModel,
    lo: f64,
    hi: f64,
    count: usize,
    scale: Scale,
    every: usize,
    cfg: &IntegratorConfig,
) -> Result<SweepSeries, NumericsError> {
    let mut series = sweep(model, lo, hi, count, scale)?;
    let picks: Vec<usize> = (0..count).step_by(every.max(1)).collect();
    let settled: Result<Vec<_>, NumericsError> = picks
        .par_iter()
        .map(|&i| {
            let pump = series.pump_values[i];
            let n = match model {
                PumpModel::TwoLevel(d) => {
                    let p = expand_two(d, pump)?;
                    match dynamics::lasing_state_two(&p)? {
                        Some(fp) if !dynamics::is_linearly_stable(&p, &fp) => None,
                        _ => Some(dynamics::settle(&p, &dynamics::default_initial_two(&p), cfg)?.photon_number),
                    }
                }
                PumpModel::SchemeA(_) | PumpModel::SchemeB(_) => {
                    let p = match model {
                        PumpModel::SchemeA(d) => expand_scheme_a(d, pump)?,
                        PumpModel::SchemeB(d) => expand_scheme_b(d, pump)?,
                        PumpModel::TwoLevel(_) => unreachable!(),
                    };
                    match dynamics::lasing_state_three(&p)? {
                        Some(fp) if !dynamics::is_linearly_stable(&p, &fp) => None,
                        _ => Some(dynamics::settle(&p, &dynamics::default_initial_three(&p), cfg)?.photon_number),
                    }
                }
            };
            Ok((i, n))
        })
        .collect();
    series.oracle = settled?;
    Ok(series)
}
