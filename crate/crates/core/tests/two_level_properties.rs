use approx::assert_relative_eq;
use hiercon_core::two_level::{
    build_contracts, objective_at, principal_objective, solve_two_level, solve_two_level_2d, value_from_dynamics,
};
use hiercon_core::{FirmSpec, GammaRule, Regime, WorkerParams};
use proptest::prelude::*;

fn reference() -> WorkerParams {
    WorkerParams::new(1000.0, 50.0, 1.0).unwrap()
}

fn firm(n: usize) -> FirmSpec {
    FirmSpec::identical(reference(), n, 1.0).unwrap()
}

fn worker() -> impl Strategy<Value = WorkerParams> {
    (10.0..2000.0f64, 1.0..100.0f64, 0.1..3.0f64).prop_map(|(k, r, s)| WorkerParams::new(k, r, s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn regime_dominance(m in worker(), agent in worker(), n in 0usize..=30) {
        let f = FirmSpec::new(m, vec![agent; n], 1.0).unwrap();
        let soph = solve_two_level(&f, Regime::Sophisticated).unwrap();
        let lin = solve_two_level(&f, Regime::Linear).unwrap();
        let dc = solve_two_level(&f, Regime::Direct).unwrap();
        let tol = 1e-6 * dc.principal_value.abs().max(1.0);
        prop_assert!(soph.principal_value >= lin.principal_value - tol,
            "soph {} < lin {}", soph.principal_value, lin.principal_value);
        prop_assert!(lin.principal_value <= dc.principal_value + tol);
        prop_assert!(soph.principal_value <= dc.principal_value + tol);
        prop_assert!(lin.principal_value >= 0.0);
    }

    #[test]
    fn value_routes_agree(m in worker(), agents in prop::collection::vec(worker(), 0..6)) {
        let f = FirmSpec::new(m, agents, 1.0).unwrap();
        let r = solve_two_level(&f, Regime::Sophisticated).unwrap();
        let v = value_from_dynamics(r.rate(), &f).unwrap();
        prop_assert!((v - r.principal_value).abs() <= 1e-9 * r.principal_value.abs().max(1.0));
    }
}

#[test]
fn agent_rates_exceed_dc_and_stay_below_one() {
    let dc = reference().dc_rate();
    for n in 1..=29 {
        for regime in [Regime::Sophisticated, Regime::Linear] {
            let r = solve_two_level(&firm(n), regime).unwrap();
            for &z in &r.agent_rates {
                assert!(z > dc && z < 1.0, "n={n} {regime}: {z}");
            }
        }
    }
}

#[test]
fn manager_rate_non_increasing_in_team_size() {
    let zs: Vec<f64> = (0..=29)
        .map(|n| solve_two_level(&firm(n), Regime::Sophisticated).unwrap().z_b)
        .collect();
    for w in zs.windows(2) {
        assert!(w[1] <= w[0] + 1e-10, "{zs:?}");
    }
}

#[test]
fn foc_residual_small() {
    for n in [0, 1, 5, 29] {
        let r = solve_two_level(&firm(n), Regime::Sophisticated).unwrap();
        let d = r.diagnostics.unwrap();
        assert!(d.relative_foc().unwrap() < 1e-4, "n={n}: {d:?}");
        assert!(!d.on_boundary);
    }
}

#[test]
fn optimum_beats_fine_grid() {
    let f = firm(4);
    let r = solve_two_level(&f, Regime::Sophisticated).unwrap();
    let grid_best = (1..=150_000)
        .map(|i| principal_objective(i as f64 * 1e-5, &f, GammaRule::Cubic).unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(r.principal_value >= grid_best - 1e-9);
    assert!(r.principal_value - grid_best < 1e-6);
}

#[test]
fn two_workers_beat_three_per_head() {
    let two = solve_two_level(&firm(1), Regime::Sophisticated).unwrap();
    let three = solve_two_level(&firm(2), Regime::Sophisticated).unwrap();
    assert!(two.value_per_worker() > three.value_per_worker());
}

#[test]
fn per_worker_value_below_dc_and_above_linear() {
    let s = solve_two_level(&firm(29), Regime::Sophisticated).unwrap();
    let l = solve_two_level(&firm(29), Regime::Linear).unwrap();
    assert!(s.value_per_worker() < 476.1904762);
    assert!(s.value_per_worker() >= l.value_per_worker());
}

#[test]
fn substitution_agrees_with_free_gamma() {
    for n in [1, 5, 29] {
        let f = firm(n);
        let s = solve_two_level(&f, Regime::Sophisticated).unwrap();
        let (_, rep) = solve_two_level_2d(&f).unwrap();
        assert!(
            (rep.value - s.principal_value).abs() <= 1e-6 * s.principal_value,
            "n={n}: {} vs {}",
            rep.value,
            s.principal_value
        );
    }
}

#[test]
fn contracts_reproduce_solution() {
    let f = FirmSpec::new(reference(), vec![reference(), WorkerParams::new(200.0, 5.0, 2.0).unwrap()], 2.0).unwrap();
    let r = solve_two_level(&f, Regime::Sophisticated).unwrap();
    let (m, agents) = build_contracts(&r, &f).unwrap();
    assert_eq!(Some(m), r.manager_contract);
    assert_eq!(agents.len(), 2);
    for (c, (&z, a)) in agents.iter().zip(r.agent_rates.iter().zip(f.agents())) {
        assert_eq!(c.z, z);
        assert_relative_eq!(c.qv_coeff, 0.5 * a.r() * z * z);
    }
    assert_relative_eq!(r.horizon_value(), 2.0 * objective_at(r.rate(), &f).unwrap());
    assert!(build_contracts(&solve_two_level(&f, Regime::Direct).unwrap(), &f).is_err());
}
