use cogrelay::region::{sweep, Grid, PointMode, RegionPoint, SweepMode, SweepSpec};
use cogrelay::scenario;
use cogrelay::simulator::System;
use cogrelay::Exec;

fn fig3_spec(mode: SweepMode, systems: Vec<System>) -> SweepSpec {
    let mut spec = SweepSpec::new(Grid { start: 0.0, stop: 0.4, step: 0.05 }, vec![0.2], systems, mode);
    spec.seed = 11;
    spec
}

fn of(points: &[RegionPoint], mode: PointMode) -> Vec<&RegionPoint> {
    points.iter().filter(|p| p.mode == mode).collect()
}

#[test]
fn analytic_and_empirical_boundaries_agree() {
    let cfg = scenario::bundled("fig3").unwrap().config;
    let points = sweep(&cfg, &fig3_spec(SweepMode::Both, vec![System::S])).unwrap();
    let (an, em) = (of(&points, PointMode::Analytic), of(&points, PointMode::Empirical));
    assert_eq!(an.len(), 9);
    for (a, e) in an.iter().zip(&em) {
        assert_eq!(a.lambda_p1, e.lambda_p1);
        assert_eq!(a.feasible, e.feasible, "lambda_p1 {}", a.lambda_p1);
        if a.feasible {
            let gap = (a.lambda_s_max - e.lambda_s_max).abs();
            assert!(gap <= 0.02, "lambda_p1 {}: analytic {} empirical {}", a.lambda_p1, a.lambda_s_max, e.lambda_s_max);
        }
    }
}

#[test]
fn infeasible_points_are_kept_and_zeroed() {
    let cfg = scenario::bundled("fig3").unwrap().config;
    let spec = SweepSpec::new(Grid { start: 0.3, stop: 0.6, step: 0.1 }, vec![0.2], vec![System::S], SweepMode::Analytic);
    let points = sweep(&cfg, &spec).unwrap();
    assert_eq!(points.len(), 4);
    for p in &points {
        assert!((0.0..=1.0).contains(&p.lambda_s_max));
        if !p.feasible {
            assert_eq!(p.lambda_s_max, 0.0);
        }
    }
    assert!(points[0].feasible);
    assert!(!points[3].feasible);
}

#[test]
fn output_order_and_values_do_not_depend_on_scheduling() {
    let cfg = scenario::bundled("fig3").unwrap().config;
    let mut spec = fig3_spec(SweepMode::Both, vec![System::S, System::S2]);
    spec.lambda_p2 = vec![0.1, 0.2];
    spec.boundary.probe.slots = 20_000;
    spec.exec = Exec::Sequential;
    let a = sweep(&cfg, &spec).unwrap();
    spec.exec = Exec::Parallel;
    let b = sweep(&cfg, &spec).unwrap();
    assert_eq!(a, b);
    let order: Vec<_> = a.iter().map(|p| (p.lambda_p2, p.lambda_p1)).collect();
    let mut sorted = order.clone();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    assert_eq!(order, sorted);
}

#[test]
fn bad_grids_are_rejected() {
    let cfg = scenario::bundled("fig3").unwrap().config;
    let bad = SweepSpec::new(Grid { start: 0.0, stop: 1.5, step: 0.1 }, vec![0.2], vec![System::S], SweepMode::Analytic);
    assert!(sweep(&cfg, &bad).is_err());
    let bad = SweepSpec::new(Grid::single(0.1), vec![], vec![System::S], SweepMode::Analytic);
    assert!(sweep(&cfg, &bad).is_err());
}
