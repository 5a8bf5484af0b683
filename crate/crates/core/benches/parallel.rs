//! Sequential vs rayon execution of the data-parallel paths.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cogrelay::channel::link_table;
use cogrelay::optimizer::{optimize_probs, AlphaMode, OptimizeOptions};
use cogrelay::region::{sweep, Grid, SweepMode, SweepSpec};
use cogrelay::scenario::bundled;
use cogrelay::simulator::System;
use cogrelay::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn alpha_grid(c: &mut Criterion) {
    let s = bundled("fig1").unwrap();
    let probs = link_table(&s.config).unwrap();
    let mut g = c.benchmark_group("independent_alpha_grid");
    for (name, exec) in MODES {
        let opts = OptimizeOptions { alpha_mode: AlphaMode::Independent, alpha_step: 0.02, exec, ..Default::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| optimize_probs(&probs, &s.config.arrivals, opts).unwrap())
        });
    }
    g.finish();
}

fn analytic_sweep(c: &mut Criterion) {
    let s = bundled("table1").unwrap();
    let mut g = c.benchmark_group("analytic_sweep");
    g.sample_size(10);
    for (name, exec) in MODES {
        let mut spec = SweepSpec::new(
            Grid { start: 0.0, stop: 0.5, step: 0.025 },
            vec![0.1, 0.3],
            vec![System::S],
            SweepMode::Analytic,
        );
        spec.exec = exec;
        g.bench_with_input(BenchmarkId::from_parameter(name), &spec, |b, spec| b.iter(|| sweep(&s.config, spec).unwrap()));
    }
    g.finish();
}

fn empirical_sweep(c: &mut Criterion) {
    let s = bundled("fig3").unwrap();
    let mut g = c.benchmark_group("empirical_sweep");
    g.sample_size(10);
    for (name, exec) in MODES {
        let mut spec = SweepSpec::new(
            Grid { start: 0.1, stop: 0.3, step: 0.1 },
            vec![0.2],
            vec![System::S1, System::S2],
            SweepMode::Empirical,
        );
        spec.boundary.probe.slots = 20_000;
        spec.exec = exec;
        g.bench_with_input(BenchmarkId::from_parameter(name), &spec, |b, spec| b.iter(|| sweep(&s.config, spec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, alpha_grid, analytic_sweep, empirical_sweep);
criterion_main!(benches);
