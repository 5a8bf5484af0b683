mod common;

use cogrelay::channel::link_table;
use cogrelay::optimizer::lp::active_constraints;
use cogrelay::optimizer::{
    build_lp, optimize_probs, solve_lp, symmetric_solve, AlphaMode, OptimizeOptions, SolveStatus,
};
use cogrelay::rates::secondary_service_rate;
use cogrelay::{scenario, Arrivals, Error};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn coarse(mode: AlphaMode) -> OptimizeOptions {
    OptimizeOptions { alpha_step: 0.05, ..OptimizeOptions::default() }.with_mode(mode)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lp_optimum_is_a_feasible_vertex(seed in any::<u64>()) {
        let inst = common::random_instance(&mut ChaCha8Rng::seed_from_u64(seed));
        let model = build_lp(&inst.probs, &inst.arrivals, inst.alpha, 0.0).unwrap();
        let sol = solve_lp(&model);
        prop_assert_eq!(sol.status, SolveStatus::Optimal);
        let p = sol.policy.unwrap();
        p.validate().unwrap();
        prop_assert!(common::max_residual(&inst, &p) <= 1e-9);

        let xs = [p.eta[0], p.eta[1], p.eta[2], p.eta[3], p.a_s1, p.a_s2];
        prop_assert!(active_constraints(&model, &xs).len() >= 6);

        let (pi, _) = inst.pi_and_load();
        let lib = secondary_service_rate(&inst.probs, pi[0], pi[1], &p).unwrap();
        let oracle = common::mu_s(&inst.probs, pi, p.eta, [p.a_s1, p.a_s2]);
        prop_assert!((lib - sol.mu_s_max).abs() <= 1e-9);
        prop_assert!((oracle - sol.mu_s_max).abs() <= 1e-9);
    }

    #[test]
    fn throughput_does_not_rise_with_primary_load(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probs = common::random_probs(&mut rng);
        let lambda_p2 = probs.p2_pd2 * 0.8;
        let mut prev = f64::INFINITY;
        for k in 0..=10 {
            let arrivals = Arrivals { lambda_p1: k as f64 * 0.1, lambda_p2, lambda_s: None };
            let v = match optimize_probs(&probs, &arrivals, &coarse(AlphaMode::Equal)) {
                Ok(s) if s.is_optimal() => s.mu_s_max,
                Ok(_) | Err(Error::PrimaryInfeasible { .. }) => 0.0,
                Err(e) => panic!("{e}"),
            };
            prop_assert!(v <= prev + 1e-12, "lambda_p1 = {}: {} > {}", k as f64 * 0.1, v, prev);
            prev = v;
        }
    }

    #[test]
    fn equal_alpha_never_beats_independent(seed in any::<u64>()) {
        let inst = common::random_instance(&mut ChaCha8Rng::seed_from_u64(seed));
        let solve = |mode| optimize_probs(&inst.probs, &inst.arrivals, &coarse(mode)).ok().filter(|s| s.is_optimal());
        let eq = solve(AlphaMode::Equal).map_or(0.0, |s| s.mu_s_max);
        let ind = solve(AlphaMode::Independent).map_or(0.0, |s| s.mu_s_max);
        prop_assert!(eq <= ind);
    }

    #[test]
    fn closed_form_agrees_with_grid_search(
        pd in 0.05f64..0.9, ps in 0.05f64..0.95, spd in 0.05f64..0.95,
        half in 0.05f64..0.95, merged in 0.05f64..0.95, load in 0.0f64..1.0,
    ) {
        let probs = common::symmetric_probs(pd, ps, spd, half, merged);
        let lambda = load * common::mu_p(pd, ps, 1.0);
        let arrivals = Arrivals { lambda_p1: lambda, lambda_p2: lambda, lambda_s: None };
        let opts = coarse(AlphaMode::Equal);
        let closed = symmetric_solve(&probs, &arrivals, &opts).unwrap();
        let lp = optimize_probs(&probs, &arrivals, &opts).unwrap();
        prop_assert_eq!(closed.is_optimal(), lp.is_optimal());
        prop_assert!((closed.mu_s_max - lp.mu_s_max).abs() <= 1e-9);

        // eta4 is only used at the vertices where the relay row binds with
        // z = 1 - D or with the merged band unused.
        if let Some(p) = closed.policy {
            let alpha = closed.alpha[0];
            let (pi, lsr) = common::primary(pd, ps, alpha, lambda);
            let d = lsr / (pi * spd);
            let eta4 = p.eta[3];
            prop_assert!(eta4 <= 1e-12 || p.eta[0] <= 1e-12 || (p.eta[0] - (1.0 - d) / pi).abs() <= 1e-9);
        }
    }
}

#[test]
fn fig3_equal_alpha_matches_independent() {
    // With these parameters a shared admittance factor loses nothing.
    let probs = link_table(&scenario::bundled("fig3").unwrap().config).unwrap();
    for k in 0..8 {
        let arrivals = Arrivals { lambda_p1: k as f64 * 0.05, lambda_p2: 0.2, lambda_s: None };
        let eq = optimize_probs(&probs, &arrivals, &OptimizeOptions::default().with_mode(AlphaMode::Equal)).unwrap();
        let ind = optimize_probs(&probs, &arrivals, &OptimizeOptions::default().with_mode(AlphaMode::Independent)).unwrap();
        assert!((eq.mu_s_max - ind.mu_s_max).abs() <= 1e-9, "lambda_p1 {}: {} vs {}", arrivals.lambda_p1, eq.mu_s_max, ind.mu_s_max);
    }
}

#[test]
fn sequential_and_parallel_grids_agree() {
    let probs = link_table(&scenario::bundled("fig1").unwrap().config).unwrap();
    let arrivals = Arrivals { lambda_p1: 0.25, lambda_p2: 0.2, lambda_s: None };
    let mut opts = OptimizeOptions::default().with_mode(AlphaMode::Independent);
    opts.exec = cogrelay::Exec::Sequential;
    let a = optimize_probs(&probs, &arrivals, &opts).unwrap();
    opts.exec = cogrelay::Exec::Parallel;
    let b = optimize_probs(&probs, &arrivals, &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn overloaded_primary_is_reported() {
    let probs = link_table(&scenario::bundled("fig3").unwrap().config).unwrap();
    let arrivals = Arrivals { lambda_p1: 0.9, lambda_p2: 0.2, lambda_s: None };
    match optimize_probs(&probs, &arrivals, &OptimizeOptions::default()) {
        Err(Error::PrimaryInfeasible { user: 1, lower_bound }) => assert!(lower_bound > 1.0),
        other => panic!("{other:?}"),
    }
}
