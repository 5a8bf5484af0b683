//! Empirical stability tests and stability-boundary search.

use super::{run, SimConfig, SimOutcome, System, Verdict};
use crate::channel::link_table;
use crate::config::SystemConfig;
use crate::error::{QueueId, Result};
use crate::optimizer::{alpha_bounds, optimize_probs, OptimizeOptions};
use crate::rates::Policy;

/// Extra relay arrival rate (packets/slot) the simulated `S` policy is
/// optimized for. The analytic optimum loads relaying queues exactly to
/// capacity, which no finite simulation can call stable.
pub const RELAY_BACKOFF: f64 = 0.002;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub slots: u64,
    pub warmup: u64,
    pub drift_eps: f64,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { slots: 1_000_000, warmup: 0, drift_eps: 1e-4, seed: 0 }
    }
}

/// Simulates `cfg` with the secondary arrival rate set to `lambda_s` and
/// returns the full outcome; the per-queue verdicts are the probe result.
pub fn stability_probe(
    cfg: &SystemConfig,
    system: System,
    policy: &Policy,
    lambda_s: f64,
    opts: &ProbeOptions,
) -> Result<SimOutcome> {
    let mut config = *cfg;
    config.arrivals.lambda_s = Some(lambda_s);
    let mut sim = SimConfig::new(system, config, *policy, opts.slots, opts.seed).with_warmup(opts.warmup);
    sim.drift_eps = opts.drift_eps;
    run(&sim)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryOptions {
    pub probe: ProbeOptions,
    /// Width of the final bisection bracket.
    pub tolerance: f64,
    /// Used to pick the policy of system `S`.
    pub optimize: OptimizeOptions,
}

impl Default for BoundaryOptions {
    fn default() -> Self {
        BoundaryOptions {
            probe: ProbeOptions::default(),
            tolerance: 0.01,
            optimize: OptimizeOptions { relay_backoff: RELAY_BACKOFF, ..OptimizeOptions::default() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResult {
    pub feasible: bool,
    pub lambda_s_max: f64,
    pub alpha: [f64; 2],
    pub policy: Option<Policy>,
}

impl BoundaryResult {
    fn infeasible(alpha: [f64; 2]) -> Self {
        BoundaryResult { feasible: false, lambda_s_max: 0.0, alpha, policy: None }
    }
}

/// Largest secondary arrival rate that the simulated system keeps stable at
/// primary rates `(lambda_p1, lambda_p2)`, to within `opts.tolerance`.
///
/// Only the secondary's own queue depends on its arrival rate, so the other
/// four queues are checked once at zero secondary load. Only an `Unstable`
/// verdict rejects a rate; `Marginal` queues (boundary load, or a long
/// excursion that still drained) are accepted. Every probe reuses the same
/// seed, so successive probes differ only in the secondary arrival rate.
pub fn empirical_boundary(
    cfg: &SystemConfig,
    system: System,
    lambda_p1: f64,
    lambda_p2: f64,
    opts: &BoundaryOptions,
) -> Result<BoundaryResult> {
    let cfg = cfg.with_primary_arrivals(lambda_p1, lambda_p2);
    let probs = link_table(&cfg)?;

    let (policy, alpha) = match system {
        System::S => match optimize_probs(&probs, &cfg.arrivals, &opts.optimize) {
            Ok(sol) => match sol.policy {
                Some(p) => (p, sol.alpha),
                None => return Ok(BoundaryResult::infeasible(sol.alpha)),
            },
            Err(e) if e.is_infeasibility() => return Ok(BoundaryResult::infeasible([1.0, 1.0])),
            Err(e) => return Err(e),
        },
        System::S1 | System::S2 => {
            let b1 = alpha_bounds(1, lambda_p1, probs.p1_pd1, probs.p1_s);
            let b2 = alpha_bounds(2, lambda_p2, probs.p2_pd2, probs.p2_s);
            if b1.is_err() || b2.is_err() {
                return Ok(BoundaryResult::infeasible([1.0, 1.0]));
            }
            (Policy::new([1.0, 1.0], [1.0, 1.0], [1.0, 0.0, 0.0, 0.0])?, [1.0, 1.0])
        }
    };

    let base = stability_probe(&cfg, system, &policy, 0.0, &opts.probe)?;
    let others = [QueueId::P1, QueueId::P2, QueueId::Sr1, QueueId::Sr2];
    if others.iter().any(|&q| base.queue(q).verdict == Verdict::Unstable) {
        return Ok(BoundaryResult { policy: Some(policy), ..BoundaryResult::infeasible(alpha) });
    }

    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo >= opts.tolerance {
        let mid = 0.5 * (lo + hi);
        let out = stability_probe(&cfg, system, &policy, mid, &opts.probe)?;
        if out.queue(QueueId::S).verdict != Verdict::Unstable {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(BoundaryResult { feasible: true, lambda_s_max: lo, alpha, policy: Some(policy) })
}
