//! Stability-region curves: the largest stable secondary arrival rate along a
//! grid of primary arrival rates.

use std::fmt;

use crate::channel::link_table;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::optimizer::{optimize_probs, AlphaMode, OptimizeOptions};
use crate::rates::Policy;
use crate::simulator::streams::derive_seed;
use crate::simulator::{empirical_boundary, BoundaryOptions, System};

/// Evenly spaced values `start, start + step, ...` up to `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn single(v: f64) -> Self {
        Grid { start: v, stop: v, step: 1.0 }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.start)
            && (0.0..=1.0).contains(&self.stop)
            && self.start <= self.stop
            && self.step.is_finite()
            && self.step > 0.0;
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "{name} grid needs 0 <= start <= stop <= 1 and step > 0, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).map(|v| (v * 1e12).round() / 1e12).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Analytic,
    Empirical,
    Both,
}

/// How a region point was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointMode {
    Analytic,
    Empirical,
}

impl PointMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PointMode::Analytic => "analytic",
            PointMode::Empirical => "empirical",
        }
    }
}

impl fmt::Display for PointMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub lambda_p1: Grid,
    pub lambda_p2: Vec<f64>,
    pub systems: Vec<System>,
    pub mode: SweepMode,
    pub equal_alpha: bool,
    pub alpha_step: f64,
    /// Options of the empirical boundary search; its probe seed is replaced
    /// per point by one derived from `seed`.
    pub boundary: BoundaryOptions,
    pub seed: u64,
    pub exec: Exec,
}

impl SweepSpec {
    pub fn new(lambda_p1: Grid, lambda_p2: Vec<f64>, systems: Vec<System>, mode: SweepMode) -> Self {
        SweepSpec {
            lambda_p1,
            lambda_p2,
            systems,
            mode,
            equal_alpha: true,
            alpha_step: 0.01,
            boundary: BoundaryOptions::default(),
            seed: 0,
            exec: Exec::default(),
        }
    }

    fn optimize_options(&self) -> OptimizeOptions {
        OptimizeOptions {
            alpha_mode: if self.equal_alpha { AlphaMode::Equal } else { AlphaMode::Independent },
            alpha_step: self.alpha_step,
            relay_backoff: 0.0,
            exec: Exec::Sequential,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionPoint {
    pub lambda_p1: f64,
    pub lambda_p2: f64,
    pub system: System,
    pub mode: PointMode,
    pub feasible: bool,
    pub lambda_s_max: f64,
    pub alpha: [f64; 2],
    pub policy: Option<Policy>,
}

struct Task {
    p1_index: usize,
    p2_index: usize,
    lambda_p1: f64,
    lambda_p2: f64,
    system: System,
    mode: PointMode,
}

/// Evaluates every (grid point, system, mode) combination. Systems `S1` and
/// `S2` have no closed form, so they are always evaluated empirically.
/// Output order follows the grid (`lambda_p2` outer, `lambda_p1` inner), then
/// the order of `spec.systems`.
pub fn sweep(cfg: &SystemConfig, spec: &SweepSpec) -> Result<Vec<RegionPoint>> {
    spec.lambda_p1.validate("lambda_p1")?;
    if spec.lambda_p2.is_empty() {
        return Err(Error::InvalidConfig("lambda_p2 needs at least one value".into()));
    }
    for &v in &spec.lambda_p2 {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidConfig(format!("lambda_p2 value {v} outside [0, 1]")));
        }
    }
    cfg.validate()?;

    let mut tasks = Vec::new();
    for (p2_index, &lambda_p2) in spec.lambda_p2.iter().enumerate() {
        for (p1_index, lambda_p1) in spec.lambda_p1.values().into_iter().enumerate() {
            for &system in &spec.systems {
                let mut modes = Vec::new();
                let analytic = matches!(spec.mode, SweepMode::Analytic | SweepMode::Both) && system == System::S;
                if analytic {
                    modes.push(PointMode::Analytic);
                }
                if spec.mode != SweepMode::Analytic || system != System::S {
                    modes.push(PointMode::Empirical);
                }
                for mode in modes {
                    tasks.push(Task { p1_index, p2_index, lambda_p1, lambda_p2, system, mode });
                }
            }
        }
    }

    let results = spec.exec.map(tasks, |t| evaluate(cfg, spec, &t));
    results.into_iter().collect()
}

fn evaluate(cfg: &SystemConfig, spec: &SweepSpec, t: &Task) -> Result<RegionPoint> {
    let mut point = RegionPoint {
        lambda_p1: t.lambda_p1,
        lambda_p2: t.lambda_p2,
        system: t.system,
        mode: t.mode,
        feasible: false,
        lambda_s_max: 0.0,
        alpha: [1.0, 1.0],
        policy: None,
    };
    match t.mode {
        PointMode::Analytic => {
            let cfg = cfg.with_primary_arrivals(t.lambda_p1, t.lambda_p2);
            let probs = link_table(&cfg)?;
            match optimize_probs(&probs, &cfg.arrivals, &spec.optimize_options()) {
                Ok(sol) if sol.is_optimal() => {
                    point.feasible = true;
                    point.lambda_s_max = sol.mu_s_max.clamp(0.0, 1.0);
                    point.alpha = sol.alpha;
                    point.policy = sol.policy;
                }
                Ok(sol) => point.alpha = sol.alpha,
                Err(e) if e.is_infeasibility() => {}
                Err(e) => return Err(e),
            }
        }
        PointMode::Empirical => {
            let mut opts = spec.boundary;
            opts.optimize.alpha_mode = spec.optimize_options().alpha_mode;
            opts.optimize.alpha_step = spec.alpha_step;
            opts.optimize.exec = Exec::Sequential;
            opts.probe.seed = derive_seed(spec.seed, &[t.p2_index as u64, t.p1_index as u64, t.system.id()]);
            let r = empirical_boundary(cfg, t.system, t.lambda_p1, t.lambda_p2, &opts)?;
            point.feasible = r.feasible;
            point.lambda_s_max = if r.feasible { r.lambda_s_max } else { 0.0 };
            point.alpha = r.alpha;
            point.policy = r.policy;
        }
    }
    Ok(point)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_values() {
        let g = Grid { start: 0.0, stop: 0.3, step: 0.1 };
        assert_eq!(g.values(), vec![0.0, 0.1, 0.2, 0.3]);
        assert_eq!(Grid { start: 0.1, stop: 0.2, step: 0.5 }.values(), vec![0.1]);
        assert!(Grid { start: 0.3, stop: 0.1, step: 0.1 }.validate("x").is_err());
    }
}
