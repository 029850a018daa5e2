//! Time-domain Maxwell–Bloch equations in phase-reduced real form.
//!
//! The global phase is fixed so that the field amplitude `x` is real and
//! the lasing coherence is purely imaginary, `ρ10 = i·y`. The photon number
//! is `n = x²`, and `ṅ = 2xẋ = −2κn + 2Ngxy` reproduces the photon-number
//! equation of motion term by term.
//!
//! Integration uses the Dormand–Prince 5(4) embedded pair with standard
//! step-size control. It is explicit: strongly dephased systems are
//! integrated correctly but with small steps.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{DynamicsError, ModelError};
use crate::model::{
    gamma_perp_three, gamma_perp_two, reduce_two, BlochState2, BlochState3, PhysicalThreeLevel, PhysicalTwoLevel,
    Regime, SteadyResult,
};

/// Default seed amplitude for the field quadrature.
pub const SEED_FIELD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// `None` selects the model's default horizon.
    pub t_max: Option<f64>,
    pub steady_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-12, max_step: f64::INFINITY, t_max: None, steady_tol: 1e-10 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        let positive = |v: f64| v > 0.0 && !v.is_nan();
        if !positive(self.rel_tol) {
            return Err(DynamicsError::InvalidConfig("rel_tol"));
        }
        if !positive(self.abs_tol) {
            return Err(DynamicsError::InvalidConfig("abs_tol"));
        }
        if !positive(self.max_step) {
            return Err(DynamicsError::InvalidConfig("max_step"));
        }
        if !positive(self.steady_tol) {
            return Err(DynamicsError::InvalidConfig("steady_tol"));
        }
        if matches!(self.t_max, Some(t) if !(t > 0.0 && t.is_finite())) {
            return Err(DynamicsError::InvalidConfig("t_max"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub photon_numbers: Vec<f64>,
}

/// A laser model with a fixed-size real state vector.
pub trait BlochModel {
    type State: Copy + Debug;
    type Vector: Copy + Default + AsRef<[f64]> + AsMut<[f64]>;

    fn pack(state: &Self::State) -> Self::Vector;
    fn unpack(v: &Self::Vector) -> Self::State;
    fn rhs(&self, v: &Self::Vector) -> Self::Vector;
    /// Row-major Jacobian of [`BlochModel::rhs`] with row stride equal to
    /// the state dimension; trailing entries are zero.
    fn jacobian(&self, v: &Self::Vector) -> Matrix;
    fn photon_number(state: &Self::State) -> f64;
    /// `10³` times the inverse of the slowest relaxation rate.
    fn default_t_max(&self) -> f64;
    fn gamma_perp(&self) -> f64;
    fn populations(state: &Self::State) -> Vec<f64>;
}

/// `(ρ̇11, ẏ, ẋ)` of the two-level laser:
/// `ρ̇11 = −γρ11 + Γ(1 − ρ11) − 2gxy`, `ẏ = −γ⊥y + gx(2ρ11 − 1)`, `ẋ = −κx + Ngy`.
pub fn derivs_two(state: &BlochState2, p: &PhysicalTwoLevel) -> BlochState2 {
    let BlochState2 { rho11, y, x } = *state;
    let g = p.coupling_g;
    BlochState2 {
        rho11: -p.gamma_decay * rho11 + p.pump_rate * (1.0 - rho11) - 2.0 * g * x * y,
        y: -gamma_perp_two(p) * y + g * x * (2.0 * rho11 - 1.0),
        x: -p.cavity_kappa * x + p.n_atoms * g * y,
    }
}

/// `(ρ̇11, ρ̇22, ẏ, ẋ)` of the three-level laser with `ρ00 = 1 − ρ11 − ρ22`.
pub fn derivs_three(state: &BlochState3, p: &PhysicalThreeLevel) -> BlochState3 {
    let BlochState3 { rho11, rho22, y, x } = *state;
    let rho00 = 1.0 - rho11 - rho22;
    let g = p.coupling_g;
    BlochState3 {
        rho11: p.gamma_21 * rho22 - p.gamma_10 * rho11 - 2.0 * g * x * y,
        rho22: p.gamma_02 * rho00 - p.gamma_21 * rho22,
        y: -gamma_perp_three(p) * y + g * x * (rho11 - rho00),
        x: -p.cavity_kappa * x + p.n_atoms * g * y,
    }
}

fn slowest(rates: &[f64]) -> f64 {
    rates.iter().copied().filter(|r| *r > 0.0).fold(f64::INFINITY, f64::min)
}

impl BlochModel for PhysicalTwoLevel {
    type State = BlochState2;
    type Vector = [f64; 3];

    fn pack(s: &BlochState2) -> [f64; 3] {
        [s.rho11, s.y, s.x]
    }

    fn unpack(v: &[f64; 3]) -> BlochState2 {
        BlochState2 { rho11: v[0], y: v[1], x: v[2] }
    }

    fn rhs(&self, v: &[f64; 3]) -> [f64; 3] {
        Self::pack(&derivs_two(&Self::unpack(v), self))
    }

    fn jacobian(&self, v: &[f64; 3]) -> Matrix {
        let [rho11, y, x] = *v;
        let g = self.coupling_g;
        #[rustfmt::skip]
        let j = [
            -self.gamma_decay - self.pump_rate, -2.0 * g * x, -2.0 * g * y,
            2.0 * g * x, -gamma_perp_two(self), g * (2.0 * rho11 - 1.0),
            0.0, self.n_atoms * g, -self.cavity_kappa,
            0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
        ];
        j
    }

    fn photon_number(s: &BlochState2) -> f64 {
        s.photon_number()
    }

    fn default_t_max(&self) -> f64 {
        1e3 / slowest(&[self.cavity_kappa, self.gamma_decay + self.pump_rate, gamma_perp_two(self)])
    }

    fn gamma_perp(&self) -> f64 {
        gamma_perp_two(self)
    }

    fn populations(s: &BlochState2) -> Vec<f64> {
        vec![s.rho00(), s.rho11]
    }
}

impl BlochModel for PhysicalThreeLevel {
    type State = BlochState3;
    type Vector = [f64; 4];

    fn pack(s: &BlochState3) -> [f64; 4] {
        [s.rho11, s.rho22, s.y, s.x]
    }

    fn unpack(v: &[f64; 4]) -> BlochState3 {
        BlochState3 { rho11: v[0], rho22: v[1], y: v[2], x: v[3] }
    }

    fn rhs(&self, v: &[f64; 4]) -> [f64; 4] {
        Self::pack(&derivs_three(&Self::unpack(v), self))
    }

    fn jacobian(&self, v: &[f64; 4]) -> Matrix {
        let [rho11, rho22, y, x] = *v;
        let g = self.coupling_g;
        let inversion = 2.0 * rho11 + rho22 - 1.0;
        #[rustfmt::skip]
        let j = [
            -self.gamma_10, self.gamma_21, -2.0 * g * x, -2.0 * g * y,
            -self.gamma_02, -self.gamma_02 - self.gamma_21, 0.0, 0.0,
            2.0 * g * x, g * x, -gamma_perp_three(self), g * inversion,
            0.0, 0.0, self.n_atoms * g, -self.cavity_kappa,
        ];
        j
    }

    fn photon_number(s: &BlochState3) -> f64 {
        s.photon_number()
    }

    fn default_t_max(&self) -> f64 {
        1e3 / slowest(&[self.cavity_kappa, self.gamma_21, self.gamma_02, self.gamma_10, gamma_perp_three(self)])
    }

    fn gamma_perp(&self) -> f64 {
        gamma_perp_three(self)
    }

    fn populations(s: &BlochState3) -> Vec<f64> {
        vec![s.rho00(), s.rho11, s.rho22]
    }
}

/// No-field populations with a small seed field.
pub fn default_initial_two(p: &PhysicalTwoLevel) -> BlochState2 {
    let total = p.pump_rate + p.gamma_decay;
    BlochState2 { rho11: p.pump_rate / total, y: 0.0, x: SEED_FIELD }
}

/// No-field rate-equation populations with a small seed field.
pub fn default_initial_three(p: &PhysicalThreeLevel) -> BlochState3 {
    let pops = crate::steady::no_field_populations(p.gamma_21, p.gamma_02, p.gamma_10);
    BlochState3 { rho11: pops[1], rho22: pops[2], y: 0.0, x: SEED_FIELD }
}

/// Closed-form lasing fixed point with `x = √n ≥ 0`, or `None` below threshold.
pub fn lasing_state_two(p: &PhysicalTwoLevel) -> Result<Option<BlochState2>, ModelError> {
    let (d, pump) = reduce_two(p)?;
    let r = crate::steady::n_two_level(&d, pump);
    if r.raw_bracket <= 0.0 {
        return Ok(None);
    }
    let x = r.photon_number.sqrt();
    let y = p.cavity_kappa * x / (p.n_atoms * p.coupling_g);
    Ok(Some(BlochState2 { rho11: r.populations[1], y, x }))
}

/// Three-level counterpart of [`lasing_state_two`].
pub fn lasing_state_three(p: &PhysicalThreeLevel) -> Result<Option<BlochState3>, ModelError> {
    let r = crate::steady::n_three_physical(p)?;
    if r.raw_bracket <= 0.0 {
        return Ok(None);
    }
    let x = r.photon_number.sqrt();
    let y = p.cavity_kappa * x / (p.n_atoms * p.coupling_g);
    Ok(Some(BlochState3 { rho11: r.populations[1], rho22: r.populations[2], y, x }))
}

// Dormand–Prince 5(4) tableau; the systems are autonomous so the nodes are unused.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order solution minus embedded fourth-order solution.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Largest `h·ρ(J)` allowed. Without this cap the controller grows `h` up
/// to the stability boundary as a trajectory approaches a fixed point, and
/// the state then jitters at the tolerance level instead of converging.
const STABILITY_LIMIT: f64 = 1.0;
/// Accepted steps between refreshes of the spectral radius estimate.
const RADIUS_REFRESH: u64 = 4;

/// Square matrix of order at most 4, row-major with stride equal to the order.
pub type Matrix = [f64; 16];

fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Matrix {
    let mut c = [0.0; 16];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik != 0.0 {
                for j in 0..n {
                    c[i * n + j] += aik * b[k * n + j];
                }
            }
        }
    }
    c
}

/// Spectral radius estimate `‖J^32‖^(1/32)` by normalized repeated squaring.
/// Overestimates by at most a factor `(√n·κ(V))^(1/32)` for diagonalizable `J`.
pub fn spectral_radius(jac: &[f64], n: usize) -> f64 {
    let frob = |m: &[f64]| norm(&m[..n * n]);
    let s = frob(jac);
    if s == 0.0 || !s.is_finite() {
        return if s == 0.0 { 0.0 } else { f64::INFINITY };
    }
    let mut b = [0.0; 16];
    for (bi, ji) in b.iter_mut().zip(&jac[..n * n]) {
        *bi = ji / s;
    }
    let mut log_norm = s.ln();
    let mut power = 1.0;
    for _ in 0..5 {
        b = mat_mul(&b, &b, n);
        let nb = frob(&b);
        if nb == 0.0 {
            return 0.0;
        }
        b.iter_mut().for_each(|v| *v /= nb);
        log_norm = 2.0 * log_norm + nb.ln();
        power *= 2.0;
    }
    (log_norm / power).exp()
}

/// Characteristic polynomial `λⁿ + c[n−1]λⁿ⁻¹ + … + c[0]` (Faddeev–LeVerrier);
/// returns `[c[n−1], …, c[0]]`.
fn characteristic_coefficients(a: &[f64], n: usize) -> Vec<f64> {
    let mut coeffs = Vec::with_capacity(n);
    let mut m = [0.0; 16];
    let mut c_prev = 1.0;
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let mut next = mat_mul(a, &m, n);
        for i in 0..n {
            next[i * n + i] += c_prev;
        }
        let am = mat_mul(a, &next, n);
        let trace: f64 = (0..n).map(|i| am[i * n + i]).sum();
        c_prev = -trace / k as f64;
        coeffs.push(c_prev);
        m = next;
    }
    coeffs
}

/// Routh–Hurwitz test: every eigenvalue of the `n×n` matrix (n ≤ 4) has a
/// negative real part.
pub fn is_hurwitz(a: &[f64], n: usize) -> bool {
    let c = characteristic_coefficients(a, n);
    match n {
        1 => c[0] > 0.0,
        2 => c[0] > 0.0 && c[1] > 0.0,
        3 => {
            let (a1, a2, a3) = (c[0], c[1], c[2]);
            a1 > 0.0 && a3 > 0.0 && a1 * a2 > a3
        }
        4 => {
            let (a1, a2, a3, a4) = (c[0], c[1], c[2], c[3]);
            a1 > 0.0 && a3 > 0.0 && a4 > 0.0 && a1 * a2 * a3 > a3 * a3 + a1 * a1 * a4
        }
        _ => unimplemented!("Hurwitz test only for n <= 4"),
    }
}

/// Whether `state` is a linearly stable fixed point candidate of `model`
/// (Jacobian eigenvalues strictly in the left half-plane).
pub fn is_linearly_stable<M: BlochModel>(model: &M, state: &M::State) -> bool {
    let v = M::pack(state);
    is_hurwitz(&model.jacobian(&v), v.as_ref().len())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

enum Flow {
    Continue,
    Stop,
}

struct RunEnd<V> {
    t: f64,
    y: V,
    dy: V,
    stopped: bool,
}

/// Adaptive DOPRI5 loop. `observe(t, y, f(y), h)` runs on the initial state
/// (with `h = 0`) and after every accepted step of size `h`.
fn run<M: BlochModel>(
    model: &M,
    y0: M::Vector,
    cfg: &IntegratorConfig,
    mut observe: impl FnMut(f64, &M::Vector, &M::Vector, f64) -> Flow,
) -> Result<RunEnd<M::Vector>, DynamicsError> {
    cfg.validate()?;
    let t_end = cfg.t_max.unwrap_or_else(|| model.default_t_max());
    let dim = y0.as_ref().len();
    let scale = |y: &[f64], i: usize| cfg.abs_tol + cfg.rel_tol * y[i].abs();

    let mut t = 0.0;
    let mut y = y0;
    let mut k1 = model.rhs(&y);
    if let Flow::Stop = observe(t, &y, &k1, 0.0) {
        return Ok(RunEnd { t, y, dy: k1, stopped: true });
    }

    // Initial step from the usual derivative-scale heuristic.
    let d0 = norm(&(0..dim).map(|i| y.as_ref()[i] / scale(y.as_ref(), i)).collect::<Vec<_>>());
    let d1 = norm(&(0..dim).map(|i| k1.as_ref()[i] / scale(y.as_ref(), i)).collect::<Vec<_>>());
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(cfg.max_step).min(t_end);

    let mut stability_cap = STABILITY_LIMIT / spectral_radius(&model.jacobian(&y), dim);
    let mut accepted = 0u64;
    let mut k = [M::Vector::default(); 7];
    let mut stage = M::Vector::default();

    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        k[0] = k1;
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj.as_ref()[i];
                }
                stage.as_mut()[i] = y.as_ref()[i] + h * acc;
            }
            k[s] = model.rhs(&stage);
        }
        // Row 6 of A is the fifth-order solution, so `stage` now holds y_new.
        let y_new = stage;

        let mut err = 0.0;
        for i in 0..dim {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj.as_ref()[i];
            }
            let sc = cfg.abs_tol + cfg.rel_tol * y.as_ref()[i].abs().max(y_new.as_ref()[i].abs());
            err += (h * e / sc).powi(2);
        }
        let err = (err / dim as f64).sqrt();

        if err.is_finite() && err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k[6];
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if let Flow::Stop = observe(t, &y, &k1, h) {
                return Ok(RunEnd { t, y, dy: k1, stopped: true });
            }
            accepted += 1;
            if accepted.is_multiple_of(RADIUS_REFRESH) {
                stability_cap = STABILITY_LIMIT / spectral_radius(&model.jacobian(&y), dim);
            }
            h = (h * factor).min(cfg.max_step).min(stability_cap);
        } else {
            let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= factor;
        }

        if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(DynamicsError::Stiffness { t, h, state: y.as_ref().to_vec() });
        }
    }
    Ok(RunEnd { t, y, dy: k1, stopped: false })
}

/// Integrates from `t = 0` to the configured horizon, recording the initial
/// state and every accepted step.
pub fn integrate<M: BlochModel>(
    model: &M,
    initial: &M::State,
    cfg: &IntegratorConfig,
) -> Result<TimeSeries<M::State>, DynamicsError> {
    let mut series = TimeSeries { times: Vec::new(), states: Vec::new(), photon_numbers: Vec::new() };
    run(model, M::pack(initial), cfg, |t, y, _, _| {
        push::<M>(&mut series, t, y);
        Flow::Continue
    })?;
    Ok(series)
}

/// Scaled residual `|f(y)| / (|y| + 1)` used as the steady-state criterion.
pub fn residual<M: BlochModel>(y: &M::Vector, dy: &M::Vector) -> f64 {
    norm(dy.as_ref()) / (norm(y.as_ref()) + 1.0)
}

/// Integrates until the scaled derivative norm drops below `steady_tol`.
///
/// The resulting photon number is classified as zero (below threshold)
/// when it is under `abs_tol`. `raw_bracket` carries the settled photon
/// number itself.
pub fn settle<M: BlochModel>(
    model: &M,
    initial: &M::State,
    cfg: &IntegratorConfig,
) -> Result<SteadyResult, DynamicsError> {
    let end = run(model, M::pack(initial), cfg, |_, y, dy, _| steady_flow::<M>(y, dy, cfg))?;
    classify_end(model, &end, cfg)
}

/// Trajectory recorded by [`settle_traced`] and how it ended.
#[derive(Debug, Clone)]
pub struct Traced<S> {
    pub series: TimeSeries<S>,
    /// The settle classification, or `NoConvergence` at `t_max`.
    pub steady: Result<SteadyResult, DynamicsError>,
}

/// [`settle`] that also records every `stride`-th accepted step. The initial
/// and final states are always recorded. Errors other than `NoConvergence`
/// abort the run.
pub fn settle_traced<M: BlochModel>(
    model: &M,
    initial: &M::State,
    cfg: &IntegratorConfig,
    stride: usize,
) -> Result<Traced<M::State>, DynamicsError> {
    if stride == 0 {
        return Err(DynamicsError::InvalidConfig("stride"));
    }
    let mut series = TimeSeries { times: Vec::new(), states: Vec::new(), photon_numbers: Vec::new() };
    let mut count = 0usize;
    let mut last_recorded = 0.0;
    let end = run(model, M::pack(initial), cfg, |t, y, dy, _| {
        let flow = steady_flow::<M>(y, dy, cfg);
        if count.is_multiple_of(stride) || matches!(flow, Flow::Stop) {
            push::<M>(&mut series, t, y);
            last_recorded = t;
        }
        count += 1;
        flow
    })?;
    if end.t > last_recorded {
        push::<M>(&mut series, end.t, &end.y);
    }
    let steady = classify_end(model, &end, cfg);
    Ok(Traced { series, steady })
}

fn push<M: BlochModel>(series: &mut TimeSeries<M::State>, t: f64, y: &M::Vector) {
    let s = M::unpack(y);
    series.times.push(t);
    series.photon_numbers.push(M::photon_number(&s));
    series.states.push(s);
}

fn steady_flow<M: BlochModel>(y: &M::Vector, dy: &M::Vector, cfg: &IntegratorConfig) -> Flow {
    if residual::<M>(y, dy) < cfg.steady_tol {
        Flow::Stop
    } else {
        Flow::Continue
    }
}

fn classify_end<M: BlochModel>(
    model: &M,
    end: &RunEnd<M::Vector>,
    cfg: &IntegratorConfig,
) -> Result<SteadyResult, DynamicsError> {
    let state = M::unpack(&end.y);
    let n = M::photon_number(&state);
    if !end.stopped {
        return Err(DynamicsError::NoConvergence {
            t: end.t,
            residual: residual::<M>(&end.y, &end.dy),
            photon_number: n,
            state: end.y.as_ref().to_vec(),
        });
    }
    let lasing = n >= cfg.abs_tol;
    Ok(SteadyResult {
        photon_number: if lasing { n } else { 0.0 },
        regime: if lasing { Regime::Lasing } else { Regime::BelowThreshold },
        populations: M::populations(&state),
        gamma_perp: model.gamma_perp(),
        raw_bracket: n,
    })
}
