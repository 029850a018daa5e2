mod common;

use common::{rel, rng, three_lasing, two_below_threshold, two_lasing};
use lasekit::dynamics::{default_initial_three, default_initial_two, integrate, settle, IntegratorConfig, SEED_FIELD};
use lasekit::model::{expand_two, reduce_two, DimensionlessTwoLevel};
use lasekit::numerics::algebraic_oracle_three;
use lasekit::steady::{n_three_physical, n_two_level, threshold_two};
use lasekit::Regime;

#[test]
fn three_level_triangle_on_random_draws() {
    let mut r = rng(11);
    let cfg = IntegratorConfig::default();
    for i in 0..40 {
        let p = three_lasing(&mut r);
        let analytic = n_three_physical(&p).unwrap().photon_number;
        assert!(rel(algebraic_oracle_three(&p).unwrap(), analytic) < 1e-12, "draw {i}: {p:?}");
        let ode = settle(&p, &default_initial_three(&p), &cfg).unwrap_or_else(|e| panic!("draw {i}: {p:?}: {e}"));
        assert_eq!(ode.regime, Regime::Lasing);
        assert!(rel(ode.photon_number, analytic) < 1e-5, "draw {i}: {p:?}: {} vs {analytic}", ode.photon_number);
    }
}

#[test]
fn two_level_oracle_on_random_draws() {
    let mut r = rng(12);
    let cfg = IntegratorConfig::default();
    for i in 0..40 {
        let p = two_lasing(&mut r);
        let (d, pump) = reduce_two(&p).unwrap();
        let analytic = n_two_level(&d, pump).photon_number;
        let ode = settle(&p, &default_initial_two(&p), &cfg).unwrap_or_else(|e| panic!("draw {i}: {p:?}: {e}"));
        assert!(rel(ode.photon_number, analytic) < 1e-5, "draw {i}: {p:?}: {} vs {analytic}", ode.photon_number);
    }
}

#[test]
fn below_threshold_settles_to_zero() {
    let mut r = rng(13);
    for i in 0..40 {
        let p = two_below_threshold(&mut r);
        let res = settle(&p, &default_initial_two(&p), &IntegratorConfig::default())
            .unwrap_or_else(|e| panic!("draw {i}: {p:?}: {e}"));
        assert_eq!(res.regime, Regime::BelowThreshold);
        assert!(res.raw_bracket < 1e-8);
    }
}

#[test]
fn populations_stay_in_bounds() {
    let mut r = rng(14);
    // The build-up transient is where bounds could break; the tail is flat.
    let cfg = IntegratorConfig { t_max: Some(50.0), ..IntegratorConfig::default() };
    for _ in 0..10 {
        let p = three_lasing(&mut r);
        let series = integrate(&p, &default_initial_three(&p), &cfg).unwrap();
        for s in &series.states {
            for v in [s.rho00(), s.rho11, s.rho22] {
                assert!((-1e-8..=1.0 + 1e-8).contains(&v), "{s:?}");
            }
        }
        assert!(series.times.windows(2).all(|w| w[1] > w[0]));
        let p = two_lasing(&mut r);
        let series = integrate(&p, &default_initial_two(&p), &cfg).unwrap();
        for s in &series.states {
            assert!((-1e-8..=1.0 + 1e-8).contains(&s.rho11), "{s:?}");
        }
    }
}

#[test]
fn just_below_threshold_field_dies() {
    let d = DimensionlessTwoLevel::new(50.0, 0.01, 0.1).unwrap();
    let thr = threshold_two(&d).unwrap();
    let p = expand_two(&d, thr * (1.0 - 1e-3)).unwrap();
    let series = integrate(&p, &default_initial_two(&p), &IntegratorConfig::default()).unwrap();
    assert_eq!(series.photon_numbers[0], SEED_FIELD * SEED_FIELD);
    assert!(*series.photon_numbers.last().unwrap() < 1e-8);
}

#[test]
fn trajectory_reaches_the_lasing_branch() {
    let d = DimensionlessTwoLevel::new(50.0, 0.01, 0.1).unwrap();
    let p = expand_two(&d, 5.0).unwrap();
    let series = integrate(&p, &default_initial_two(&p), &IntegratorConfig::default()).unwrap();
    let exact = n_two_level(&d, 5.0).photon_number;
    assert!(rel(*series.photon_numbers.last().unwrap(), exact) < 1e-6);
}
