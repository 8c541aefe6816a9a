mod common;

use tumor_immune_core::analytic::lambda1;
use tumor_immune_core::integrators::{
    milstein_step, simulate, simulate_coupled, AuxSet, BrownianIncrements, Scheme, StepPolicy,
};
use tumor_immune_core::model::State;
use tumor_immune_core::presets::{self, Preset};

use common::{gbm_strong_errors, log_log_slope};
use proptest::prelude::*;
use tumor_immune_core::model::ModelParams;
use tumor_immune_core::montecarlo::{terminal_values, Coordinate, EnsembleSpec};
use tumor_immune_core::stats::{ks_two_sample, Sample};

#[test]
fn strong_order_on_geometric_brownian_case() {
    let errs = gbm_strong_errors(6..=12, 400, 17);
    let m: Vec<(f64, f64)> = errs.iter().map(|e| (e.0, e.1)).collect();
    let e: Vec<(f64, f64)> = errs.iter().map(|e| (e.0, e.2)).collect();
    let (sm, se) = (log_log_slope(&m), log_log_slope(&e));
    assert!((0.85..=1.15).contains(&sm), "Milstein slope {sm}: {errs:?}");
    assert!(
        (0.35..=0.65).contains(&se),
        "Euler-Maruyama slope {se}: {errs:?}"
    );
}

#[test]
fn path_reproduces_from_published_increments() {
    let p = presets::weak_tumor_noise::<f64>();
    let s0 = presets::initial_state::<f64>();
    let pol = StepPolicy::default();
    let rec = simulate(&p, s0, &pol, 1.0, 42).unwrap();
    assert_eq!(rec.halvings, 0);
    let inc = BrownianIncrements::generate(42, pol.dt, 1000);
    let mut s = s0;
    for k in 0..1000 {
        let (a, b) = inc.increment(k);
        s = milstein_step(&p, s, a, b, pol.dt).unwrap();
        assert_eq!(s, rec.states[k + 1]);
    }
}

#[test]
fn extinction_preset_decays_on_most_seeds() {
    let p = presets::strong_tumor_noise::<f64>();
    let s0 = presets::initial_state::<f64>();
    let l1 = lambda1(&p);
    let t = 200.0;
    let hits = (0..100)
        .filter(|&seed| {
            let r = simulate(&p, s0, &StepPolicy::default(), t, seed).unwrap();
            r.last().unwrap().y.ln() / t <= -0.5 * l1
        })
        .count();
    assert!(
        hits >= 90,
        "{hits} of 100 seeds decayed at rate >= lambda1 / 2"
    );
}

#[test]
fn permanence_preset_stays_in_a_band() {
    let p = presets::weak_tumor_noise::<f64>();
    let s0 = presets::initial_state::<f64>();
    for seed in 0..3 {
        let r = simulate(&p, s0, &StepPolicy::default(), 500.0, seed).unwrap();
        for s in &r.states[10_000..] {
            assert!(s.x > 1e-3 && s.x < 1e3 && s.y > 1e-3 && s.y < 1e4, "{s:?}");
        }
        assert!(r.truncations.is_empty());
    }
}

#[test]
fn extinction_runs_record_underflow_truncation() {
    let p = presets::strong_tumor_noise::<f64>();
    let r = simulate(
        &p,
        presets::initial_state(),
        &StepPolicy::default(),
        2500.0,
        3,
    )
    .unwrap();
    let y = r
        .truncations
        .iter()
        .find(|t| t.coordinate == "y")
        .expect("y reaches the floor");
    assert!(y.time > 100.0);
    assert!(r.states.iter().all(|s| s.y >= 1e-300));
}

#[test]
fn euler_and_milstein_agree_for_small_noise() {
    let p = presets::weak_tumor_noise::<f64>().with_noise(1e-4, 1e-4);
    let s0 = presets::initial_state::<f64>();
    let a = simulate(&p, s0, &StepPolicy::new(Scheme::Milstein, 1e-3), 5.0, 1).unwrap();
    let b = simulate(
        &p,
        s0,
        &StepPolicy::new(Scheme::EulerMaruyama, 1e-3),
        5.0,
        1,
    )
    .unwrap();
    let (sa, sb) = (a.last().unwrap(), b.last().unwrap());
    assert!((sa.x - sb.x).abs() < 1e-7 * sa.x && (sa.y - sb.y).abs() < 1e-7 * sa.y);
}

#[test]
fn coupled_csv_layout() {
    let p = Preset::WeakTumorNoise.params::<f64>();
    let r = simulate_coupled(
        &p,
        State { x: 5.0, y: 50.0 },
        &StepPolicy::default(),
        0.01,
        1,
        AuxSet::ALL,
        0.005,
    )
    .unwrap();
    let csv = r.to_csv_string();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,x,y,psi,phi,z");
    assert_eq!(lines.len(), 12);
    assert!(lines[1].ends_with(','));
    assert_eq!(lines[6].split(',').count(), 6);
    assert!(!lines[6].ends_with(','));
}

#[test]
fn single_precision_tracks_double_precision() {
    let p64 = presets::weak_tumor_noise::<f64>();
    let p32 = presets::weak_tumor_noise::<f32>();
    let a = simulate(
        &p64,
        presets::initial_state(),
        &StepPolicy::default(),
        1.0,
        5,
    )
    .unwrap();
    let b = simulate(
        &p32,
        presets::initial_state(),
        &StepPolicy::default(),
        1.0,
        5,
    )
    .unwrap();
    let (sa, sb) = (a.last().unwrap(), b.last().unwrap());
    assert!(((sb.y as f64) - sa.y).abs() < 1e-2 * sa.y, "{sa:?} {sb:?}");
}

#[test]
fn step_refinement_does_not_shift_the_law() {
    for preset in Preset::ALL {
        let p = preset.params::<f64>();
        let s0 = preset.initial_state::<f64>();
        for which in [Coordinate::X, Coordinate::Y] {
            let base = EnsembleSpec::new(200, 5.0, 11);
            let fine = EnsembleSpec::new(200, 5.0, 12).with_policy(StepPolicy {
                dt: 2.5e-4,
                ..StepPolicy::default()
            });
            let a =
                Sample::new(terminal_values(&p, s0, &base, which).unwrap(), "dt = 1e-3").unwrap();
            let b = Sample::new(
                terminal_values(&p, s0, &fine, which).unwrap(),
                "dt = 2.5e-4",
            )
            .unwrap();
            let r = ks_two_sample(&a, &b, 0.05).unwrap();
            assert!(!r.reject, "{preset:?} {which:?}: {r:?}");
        }
    }
}

fn params_strategy() -> impl Strategy<Value = ModelParams<f64>> {
    (
        0.01f64..0.5,
        0.0f64..2.0,
        1.0f64..40.0,
        0.0f64..0.01,
        0.05f64..1.0,
        0.1f64..3.0,
        1e-4f64..1e-2,
        0.0f64..0.6,
        0.0f64..2.5,
    )
        .prop_map(
            |(sigma, rho, eta, mu, delta, alpha, beta, sigma1, sigma2)| {
                ModelParams::new(sigma, rho, eta, mu, delta, alpha, beta, sigma1, sigma2).unwrap()
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn states_stay_positive_and_comparisons_hold(p in params_strategy(), seed in 0u64..1000, x0 in 0.1f64..20.0, y0 in 0.1f64..500.0) {
        let r = simulate_coupled(&p, State { x: x0, y: y0 }, &StepPolicy::default(), 5.0, seed, AuxSet::ALL, 0.0).unwrap();
        let psi = r.aux_psi.as_ref().unwrap();
        let phi = r.aux_phi.as_ref().unwrap();
        for w in r.times.windows(2) {
            prop_assert!(w[1] > w[0]);
        }
        for (i, s) in r.states.iter().enumerate() {
            prop_assert!(s.x > 0.0 && s.y > 0.0);
            prop_assert!(s.y <= psi[i] * (1.0 + 1e-12), "y > psi at {}", i);
            prop_assert!(s.x <= phi[i] * (1.0 + 1e-12), "x > phi at {}", i);
        }
    }

    #[test]
    fn same_inputs_same_bytes(p in params_strategy(), seed in 0u64..1000) {
        let a = simulate(&p, State { x: 1.0, y: 10.0 }, &StepPolicy::default(), 0.5, seed).unwrap();
        let b = simulate(&p, State { x: 1.0, y: 10.0 }, &StepPolicy::default(), 0.5, seed).unwrap();
        prop_assert_eq!(a.to_csv_string(), b.to_csv_string());
    }
}
