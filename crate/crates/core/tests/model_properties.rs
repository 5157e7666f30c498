use approx::assert_relative_eq;
use hiercon_core::model::manager_agent_term;
use hiercon_core::{dc_solution, h_ib, is_admissible, manager_hamiltonian, z_ib, FirmSpec, RateQV, WorkerParams};
use proptest::prelude::*;

fn worker() -> impl Strategy<Value = WorkerParams> {
    (10.0..2000.0f64, 1.0..100.0f64, 0.1..3.0f64).prop_map(|(k, r, s)| WorkerParams::new(k, r, s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn z_ib_in_unit_interval(a in worker(), z in 1e-6..3.0f64, gamma in -1e4..0.0f64) {
        let zs = z_ib(RateQV::new(z, gamma), &a).unwrap();
        prop_assert!(zs > 0.0 && zs < 1.0, "z* = {zs}");
    }

    #[test]
    fn scaling_leaves_rates_unchanged(a in worker(), c in 0.1..10.0f64) {
        // k/R̃ is unchanged under k → ck, R → R/c, σ → cσ
        let b = WorkerParams::new(a.k() * c, a.r() / c, a.sigma() * c).unwrap();
        assert_relative_eq!(a.dc_rate(), b.dc_rate(), max_relative = 1e-12);
    }

    #[test]
    fn dc_value_is_additive(ws in prop::collection::vec(worker(), 1..10)) {
        let total = dc_solution(&ws).principal_value;
        let parts: f64 = ws.iter().map(|w| dc_solution(&[*w]).principal_value).sum();
        assert_relative_eq!(total, parts, max_relative = 1e-12);
    }

    #[test]
    fn h_ib_never_beats_dc(a in worker(), z in 1e-3..2.0f64, gamma in -1e3..0.0f64, r0 in 1.0..100.0f64) {
        let h = h_ib(RateQV::new(z, gamma), &a, r0).unwrap();
        prop_assert!(h <= a.dc_value() * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// The closed-form agent rate maximises the manager's per-agent bracket;
    /// checked against a grid with step 1e-5 on [0, 1.5].
    #[test]
    fn manager_hamiltonian_matches_grid(
        m in worker(),
        agents in prop::collection::vec(worker(), 0..4),
        z in 0.05..1.5f64,
        gamma in -500.0..0.0f64,
    ) {
        let firm = FirmSpec::new(m, agents.clone(), 1.0).unwrap();
        let rate = RateQV::new(z, gamma);
        prop_assume!(is_admissible(rate, &firm));
        let closed = manager_hamiltonian(rate, &firm).unwrap();
        let mut grid = 0.5 * gamma * m.variance() + m.hamiltonian(z);
        for a in &agents {
            let best = (0..=150_000)
                .map(|i| manager_agent_term(rate, a, i as f64 * 1e-5))
                .fold(f64::NEG_INFINITY, f64::max);
            grid += best;
        }
        prop_assert!(closed >= grid - 1e-9 * grid.abs().max(1.0));
        // grid within O(step²) curvature of the exact maximum
        prop_assert!(closed - grid <= 1e-6 * closed.abs().max(1.0) + 1e-6, "{closed} vs {grid}");
    }
}
