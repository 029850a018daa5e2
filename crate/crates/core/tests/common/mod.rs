#![allow(dead_code)]

use lasekit::dynamics::{
    is_hurwitz, is_linearly_stable, lasing_state_three, lasing_state_two, spectral_radius, BlochModel,
};
use lasekit::model::reduce_two;
use lasekit::model::{gamma_perp_three, gamma_perp_two};
use lasekit::steady::{raw_three_physical, threshold_two};
use lasekit::{PhysicalThreeLevel, PhysicalTwoLevel, Scheme};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Unconstrained three-level rate set, rates log-uniform in `[lo, hi]`.
pub fn three_any(rng: &mut impl Rng, lo: f64, hi: f64) -> PhysicalThreeLevel {
    let scheme = if rng.gen_bool(0.5) { Scheme::A } else { Scheme::B };
    PhysicalThreeLevel::new(
        log_uniform(rng, 1.0, 1e4),
        log_uniform(rng, lo, hi),
        log_uniform(rng, lo, hi),
        log_uniform(rng, lo, hi),
        log_uniform(rng, lo, hi),
        log_uniform(rng, lo, hi),
        log_uniform(rng, lo, hi),
        scheme,
    )
    .unwrap()
}

/// Share of the gain term that must survive the loss term. Keeps draws away
/// from threshold, where relaxation towards the fixed point slows without bound.
pub const LASING_MARGIN: f64 = 0.1;

/// Upper bound on [`step_estimate`] for oracle draws. Keeps single-core
/// runtime bounded; the explicit integrator pays for stiffness in steps.
pub const STEP_BUDGET: f64 = 1e6;

/// Dipole dephasing must exceed the cavity loss by this factor. Closer to
/// `κ ≈ γ⊥` a linearly stable lasing state can coexist with a Lorenz-type
/// attractor (field sign reversals) that captures the seeded trajectory.
pub const DIPOLE_MARGIN: f64 = 2.0;

/// Three-level draw on the lasing branch with `γ⊥ > 2κ` and a linearly
/// stable fixed point.
pub fn three_lasing(rng: &mut impl Rng) -> PhysicalThreeLevel {
    loop {
        let p = three_any(rng, 1e-2, 1e2);
        let gain = p.n_atoms / (2.0 * p.cavity_kappa) * p.gamma_21 * (p.gamma_02 - p.gamma_10)
            / (p.gamma_02 + 2.0 * p.gamma_21);
        let raw = raw_three_physical(&p).unwrap();
        if raw <= LASING_MARGIN * gain {
            continue;
        }
        if DIPOLE_MARGIN * p.cavity_kappa >= gamma_perp_three(&p) {
            continue;
        }
        let fp = lasing_state_three(&p).unwrap().unwrap();
        if is_linearly_stable(&p, &fp) && step_estimate(&p, &fp) <= STEP_BUDGET {
            return p;
        }
    }
}

/// Two-level counterpart of [`three_lasing`]: pump inside the lasing window.
pub fn two_lasing(rng: &mut impl Rng) -> PhysicalTwoLevel {
    loop {
        let p = PhysicalTwoLevel::new(
            log_uniform(rng, 1.0, 1e4),
            log_uniform(rng, 1e-2, 1e2),
            log_uniform(rng, 1e-2, 1e2),
            log_uniform(rng, 1e-2, 1e2),
            log_uniform(rng, 1e-2, 1e2),
            log_uniform(rng, 1e-2, 1e2),
        )
        .unwrap();
        let gain = p.n_atoms / (4.0 * p.cavity_kappa) * (p.pump_rate - p.gamma_decay);
        let Some(fp) = lasing_state_two(&p).unwrap() else { continue };
        if fp.photon_number() <= LASING_MARGIN * gain {
            continue;
        }
        if DIPOLE_MARGIN * p.cavity_kappa >= gamma_perp_two(&p) {
            continue;
        }
        if is_linearly_stable(&p, &fp) && step_estimate(&p, &fp) <= STEP_BUDGET {
            return p;
        }
    }
}

/// Slowest linear decay rate `min |Re λ|` of a Hurwitz Jacobian, by bisection
/// on the shift `α` for which `J + αI` stays Hurwitz.
pub fn slowest_decay(jac: &[f64], n: usize) -> f64 {
    let shifted = |alpha: f64| {
        let mut m = jac.to_vec();
        for i in 0..n {
            m[i * n + i] += alpha;
        }
        is_hurwitz(&m, n)
    };
    let (mut lo, mut hi) = (0.0, spectral_radius(jac, n));
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if shifted(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Explicit-step estimate for settling to `10⁻¹⁰` from the linearization at
/// the fixed point: fastest mode sets the step, slowest sets the duration.
pub fn step_estimate<M: BlochModel>(model: &M, state: &M::State) -> f64 {
    let v = M::pack(state);
    let n = v.as_ref().len();
    let jac = model.jacobian(&v);
    spectral_radius(&jac, n) * 1e10f64.ln() / slowest_decay(&jac, n)
}

/// Random two-level rates with the pump a fraction in `[0, 0.9)` of its
/// threshold value.
pub fn two_below_threshold(rng: &mut impl Rng) -> PhysicalTwoLevel {
    loop {
        let mut p = PhysicalTwoLevel::new(
            log_uniform(rng, 1.0, 1e4),
            log_uniform(rng, 1e-2, 1e2),
            log_uniform(rng, 1e-2, 1e2),
            log_uniform(rng, 1e-2, 1e2),
            1.0,
            log_uniform(rng, 1e-2, 1e2),
        )
        .unwrap();
        let (d, _) = reduce_two(&p).unwrap();
        if let Some(thr) = threshold_two(&d) {
            p.pump_rate = rng.gen_range(0.0..0.9) * thr * p.gamma_decay;
            return p;
        }
    }
}

/// Magnitude of the gain and loss terms whose difference is the photon
/// number; the natural scale for rounding in that difference.
pub fn term_scale(p: &PhysicalThreeLevel) -> f64 {
    let denom = p.gamma_02 + 2.0 * p.gamma_21;
    let gain = p.n_atoms / (2.0 * p.cavity_kappa) * p.gamma_21 * (p.gamma_02 - p.gamma_10) / denom;
    let sum = p.gamma_21 * p.gamma_02 + p.gamma_02 * p.gamma_10 + p.gamma_21 * p.gamma_10;
    let loss = gamma_perp_three(p) / (2.0 * p.coupling_g * p.coupling_g) * sum / denom;
    gain.abs() + loss.abs()
}
