//! Maximizes the secondary user's stable throughput subject to stability of
//! all five queues.
//!
//! For fixed admittance factors the problem is a small linear program
//! ([`lp`]). The admittance factors are chosen by grid search over the
//! interval that keeps each primary queue stable, either with both factors
//! tied together or independently. Symmetric primaries admit a closed-form
//! vertex solution ([`symmetric`]).

pub mod lp;
pub mod symmetric;

use std::fmt;

use crate::channel::{link_table, SuccessProbs};
use crate::config::{Arrivals, SystemConfig};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rates::Policy;

pub use lp::{build_lp, solve_lp, LPModel, RelayRow};
pub use symmetric::{classify, symmetric_solve, symmetric_solve_at, CaseId, SymmetricCase};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
        }
    }
}

/// A constraint of the fixed-α program that holds with equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    RelayStability(usize),
    EtaSum,
    LowerBound(&'static str),
    UpperBound(&'static str),
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::RelayStability(m) => write!(f, "relay{m}"),
            Constraint::EtaSum => write!(f, "eta_sum"),
            Constraint::LowerBound(v) => write!(f, "{v}>=0"),
            Constraint::UpperBound(v) => write!(f, "{v}<=1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    pub alpha: [f64; 2],
    pub policy: Option<Policy>,
    /// Secondary service rate of `policy`, packets/slot. Zero when infeasible.
    pub mu_s_max: f64,
    pub active_constraints: Vec<Constraint>,
    /// Free-form remarks, such as the full range of an optimal probability
    /// when the optimum is not unique.
    pub notes: Vec<String>,
}

impl Solution {
    pub fn infeasible(alpha: [f64; 2]) -> Self {
        Solution {
            status: SolveStatus::Infeasible,
            alpha,
            policy: None,
            mu_s_max: 0.0,
            active_constraints: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// How the admittance factors are searched.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaMode {
    /// One shared factor for both relaying queues.
    Equal,
    /// A two-dimensional grid.
    Independent,
    /// No search; `[0, 0]` disables cooperation.
    Fixed([f64; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub alpha_mode: AlphaMode,
    pub alpha_step: f64,
    /// Extra load (packets/slot) reserved on each active relaying queue.
    pub relay_backoff: f64,
    pub exec: Exec,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions { alpha_mode: AlphaMode::Equal, alpha_step: 0.01, relay_backoff: 0.0, exec: Exec::default() }
    }
}

impl OptimizeOptions {
    pub fn with_mode(mut self, mode: AlphaMode) -> Self {
        self.alpha_mode = mode;
        self
    }
}

/// Admissible admittance factors for primary `user`: the interval `[lo, 1]`
/// on which its queue is stable.
pub fn alpha_bounds(user: usize, lambda: f64, pbar_pd: f64, pbar_ps: f64) -> Result<[f64; 2]> {
    if lambda <= pbar_pd {
        return Ok([0.0, 1.0]);
    }
    let reach = (1.0 - pbar_pd) * pbar_ps;
    let lo = if reach > 0.0 { (lambda - pbar_pd) / reach } else { f64::INFINITY };
    if lo > 1.0 + 1e-12 {
        return Err(Error::PrimaryInfeasible { user, lower_bound: lo });
    }
    Ok([lo.min(1.0), 1.0])
}

/// Grid points in `[lo, 1]`: multiples of `step`, plus every value in `extra`.
///
/// Building all per-user grids from one candidate set means the equal-α grid
/// is always the diagonal of the independent grid.
pub fn alpha_grid(lo: f64, step: f64, extra: &[f64]) -> Vec<f64> {
    let n = (1.0 / step + 1e-9).floor() as usize;
    let mut pts: Vec<f64> = (0..=n).map(|k| (k as f64 * step).min(1.0)).collect();
    pts.extend_from_slice(extra);
    pts.push(1.0);
    pts.retain(|&a| a >= lo && a <= 1.0);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    pts
}

fn check_step(step: f64) -> Result<()> {
    if !(step.is_finite() && step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidConfig(format!("alpha step must lie in (0, 1], got {step}")));
    }
    Ok(())
}

/// The admittance pairs searched under `opts`, in tie-break order.
pub fn alpha_candidates(probs: &SuccessProbs, arrivals: &Arrivals, opts: &OptimizeOptions) -> Result<Vec<[f64; 2]>> {
    let b1 = alpha_bounds(1, arrivals.lambda_p1, probs.p1_pd1, probs.p1_s)?;
    let b2 = alpha_bounds(2, arrivals.lambda_p2, probs.p2_pd2, probs.p2_s)?;
    let los = [b1[0], b2[0]];
    match opts.alpha_mode {
        AlphaMode::Fixed(a) => {
            for (i, &v) in a.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidConfig(format!("alpha{} = {v} outside [0, 1]", i + 1)));
                }
                if v < los[i] - 1e-12 {
                    return Err(Error::PrimaryInfeasible { user: i + 1, lower_bound: los[i] });
                }
            }
            Ok(vec![a])
        }
        AlphaMode::Equal => {
            check_step(opts.alpha_step)?;
            let lo = los[0].max(los[1]);
            Ok(alpha_grid(lo, opts.alpha_step, &los).into_iter().map(|a| [a, a]).collect())
        }
        AlphaMode::Independent => {
            check_step(opts.alpha_step)?;
            let g1 = alpha_grid(los[0], opts.alpha_step, &los);
            let g2 = alpha_grid(los[1], opts.alpha_step, &los);
            Ok(g1.iter().flat_map(|&a1| g2.iter().map(move |&a2| [a1, a2])).collect())
        }
    }
}

/// Solves the fixed-α program, mapping an unsatisfiable relay to an
/// infeasible solution.
pub fn solve_at(probs: &SuccessProbs, arrivals: &Arrivals, alpha: [f64; 2], relay_backoff: f64) -> Result<Solution> {
    match build_lp(probs, arrivals, alpha, relay_backoff) {
        Ok(model) => Ok(solve_lp(&model)),
        Err(Error::RelayUnsatisfiable { .. }) => Ok(Solution::infeasible(alpha)),
        Err(e) => Err(e),
    }
}

/// Keeps the first strictly best optimal solution, so ties go to the
/// earliest (smallest) admittance factors.
pub(crate) fn pick_best(solutions: Vec<Solution>, fallback_alpha: [f64; 2]) -> Solution {
    let mut best: Option<Solution> = None;
    for s in solutions.into_iter().filter(Solution::is_optimal) {
        if best.as_ref().is_none_or(|b| s.mu_s_max > b.mu_s_max) {
            best = Some(s);
        }
    }
    best.unwrap_or_else(|| Solution::infeasible(fallback_alpha))
}

/// Best policy over the admittance grid, from precomputed link probabilities.
pub fn optimize_probs(probs: &SuccessProbs, arrivals: &Arrivals, opts: &OptimizeOptions) -> Result<Solution> {
    let grid = alpha_candidates(probs, arrivals, opts)?;
    let fallback = grid.first().copied().unwrap_or([1.0, 1.0]);
    let results = opts.exec.map(grid, |a| solve_at(probs, arrivals, a, opts.relay_backoff));
    let solutions = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(pick_best(solutions, fallback))
}

/// Best policy over the admittance grid for `cfg`.
pub fn optimize(cfg: &SystemConfig, opts: &OptimizeOptions) -> Result<Solution> {
    cfg.validate()?;
    optimize_probs(&link_table(cfg)?, &cfg.arrivals, opts)
}

/// Largest primary-1 arrival rate (to within 1e-3) for which the optimizer
/// still finds a policy stabilizing every queue, with primary 2 at
/// `lambda_p2`.
pub fn max_feasible_primary_rate(probs: &SuccessProbs, lambda_p2: f64, opts: &OptimizeOptions) -> f64 {
    let feasible = |l1: f64| {
        let arrivals = Arrivals { lambda_p1: l1, lambda_p2, lambda_s: None };
        matches!(optimize_probs(probs, &arrivals, opts), Ok(s) if s.is_optimal() && s.mu_s_max >= 0.0)
    };
    let mut lo = probs.p1_pd1;
    let mut hi = 1.0;
    if feasible(hi) {
        return hi;
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
