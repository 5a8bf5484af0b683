//! The linear program obtained once both admittance factors are fixed.
//!
//! Variables, in order: `eta1, eta2, eta3, eta4, a_s1, a_s2`; the relay
//! access probabilities are eliminated through `a_sr_m = 1 - a_s_m`.

use super::{Constraint, Solution, SolveStatus};
use crate::channel::SuccessProbs;
use crate::config::{Arrivals, Band};
use crate::error::{Error, Result};
use crate::rates::{primary_state, secondary_service_rate, Policy, PrimaryState};
use crate::simplex::{solve_lexicographic, LinearProgram, LpStatus};

pub const NUM_VARS: usize = 6;
pub const VAR_NAMES: [&str; NUM_VARS] = ["eta1", "eta2", "eta3", "eta4", "a_s1", "a_s2"];

const ETA1: usize = 0;
const A_S1: usize = 4;
const A_S2: usize = 5;

/// Tolerance for reporting a constraint as active and for the feasibility
/// guarantees of a returned policy.
pub const ACTIVE_TOL: f64 = 1e-9;

/// Stability row of relaying queue `relay` in normalized form:
/// `coef . x <= rhs`, with `rhs = 1 - D_m` and `D_m` the normalized relay load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayRow {
    pub relay: usize,
    pub coef: [f64; NUM_VARS],
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LPModel {
    pub alpha: [f64; 2],
    pub primaries: PrimaryState,
    pub probs: SuccessProbs,
    /// Coefficients of the secondary service rate itself (not divided by
    /// `pi_p1 * pi_p2`), so the objective value is `mu_s` directly.
    pub objective: [f64; NUM_VARS],
    /// Relay rows that constrain anything; a relaying queue that receives no
    /// traffic contributes no row.
    pub relay_rows: Vec<RelayRow>,
    /// Normalized relay loads `D_m = lambda_sr_m / (pi_p_m * P_s->pd_m)`.
    pub loads: [f64; 2],
}

impl LPModel {
    pub fn to_linear_program(&self) -> LinearProgram {
        let mut lp = LinearProgram::new(self.objective.to_vec());
        for row in &self.relay_rows {
            lp.add_le(row.coef.to_vec(), row.rhs);
        }
        lp.add_eq(vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0], 1.0);
        for j in 0..NUM_VARS {
            lp.set_upper(j, 1.0);
        }
        lp
    }

    /// Evaluates the objective at a raw variable vector.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

/// Builds the model for fixed admittance factors.
///
/// `relay_backoff` (packets/slot) is added to each nonzero relay arrival rate,
/// leaving the relaying queues that much strictly inside their stability
/// boundary. The analytic optimum uses 0.
pub fn build_lp(probs: &SuccessProbs, arrivals: &Arrivals, alpha: [f64; 2], relay_backoff: f64) -> Result<LPModel> {
    let primaries = primary_state(probs, arrivals, alpha)?;
    let [pi1, pi2] = primaries.pi_p;

    let both = pi1 * pi2;
    let objective = [
        both * probs.secondary(Band::Merged),
        both * probs.secondary(Band::P2),
        both * probs.secondary(Band::P1),
        0.0,
        pi1 * (1.0 - pi2) * probs.secondary(Band::P1),
        (1.0 - pi1) * pi2 * probs.secondary(Band::P2),
    ];

    let mut relay_rows = Vec::with_capacity(2);
    let mut loads = [0.0; 2];
    for m in 1..=2 {
        let (own, other) = if m == 1 { (pi1, pi2) } else { (pi2, pi1) };
        let lambda = primaries.lambda_sr[m - 1];
        if lambda == 0.0 {
            continue;
        }
        let lambda = lambda + relay_backoff;
        let capacity = own * probs.relay(m);
        let load = if capacity > 0.0 { lambda / capacity } else { f64::INFINITY };
        loads[m - 1] = load;
        if load >= 1.0 {
            return Err(Error::RelayUnsatisfiable { relay: m, load });
        }
        // Own-queue accesses that deny relay m: a_s_m when only band m is idle,
        // and the both-idle events that leave relay m out.
        let mut coef = [0.0; NUM_VARS];
        coef[ETA1] = other;
        if m == 1 {
            coef[2] = other;
            coef[A_S1] = 1.0 - other;
        } else {
            coef[1] = other;
            coef[A_S2] = 1.0 - other;
        }
        relay_rows.push(RelayRow { relay: m, coef, rhs: 1.0 - load });
    }

    Ok(LPModel { alpha, primaries, probs: *probs, objective, relay_rows, loads })
}

/// Solves the model, breaking ties toward larger `eta1`, then larger `a_s`.
pub fn solve_lp(model: &LPModel) -> Solution {
    let lp = model.to_linear_program();
    let mut prefer_merged = vec![0.0; NUM_VARS];
    prefer_merged[ETA1] = 1.0;
    let mut prefer_own = vec![0.0; NUM_VARS];
    prefer_own[A_S1] = 1.0;
    prefer_own[A_S2] = 1.0;
    let sol = solve_lexicographic(&lp, &[prefer_merged, prefer_own]);

    if sol.status != LpStatus::Optimal {
        return Solution::infeasible(model.alpha);
    }

    let x: Vec<f64> = sol.x.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let mut eta = [x[0], x[1], x[2], x[3]];
    // Absorb pivot rounding so the scheduling probabilities sum to one.
    let drift = eta.iter().sum::<f64>() - 1.0;
    let largest = (0..4).max_by(|&a, &b| eta[a].total_cmp(&eta[b])).unwrap_or(0);
    eta[largest] = (eta[largest] - drift).clamp(0.0, 1.0);

    match Policy::new(model.alpha, [x[A_S1], x[A_S2]], eta) {
        Ok(policy) => solution_from_policy(model, policy, Vec::new()),
        Err(_) => Solution::infeasible(model.alpha),
    }
}

pub(crate) fn policy_vector(p: &Policy) -> [f64; NUM_VARS] {
    [p.eta[0], p.eta[1], p.eta[2], p.eta[3], p.a_s1, p.a_s2]
}

/// Constraints of `model` that hold with equality (within [`ACTIVE_TOL`]) at `xs`.
pub fn active_constraints(model: &LPModel, xs: &[f64; NUM_VARS]) -> Vec<Constraint> {
    let mut active = Vec::new();
    for row in &model.relay_rows {
        let lhs: f64 = row.coef.iter().zip(xs).map(|(c, v)| c * v).sum();
        if row.rhs - lhs <= ACTIVE_TOL {
            active.push(Constraint::RelayStability(row.relay));
        }
    }
    active.push(Constraint::EtaSum);
    for (j, &v) in xs.iter().enumerate() {
        if v <= ACTIVE_TOL {
            active.push(Constraint::LowerBound(VAR_NAMES[j]));
        }
        if v >= 1.0 - ACTIVE_TOL {
            active.push(Constraint::UpperBound(VAR_NAMES[j]));
        }
    }
    active
}

pub(crate) fn solution_from_policy(model: &LPModel, policy: Policy, notes: Vec<String>) -> Solution {
    let xs = policy_vector(&policy);
    let [pi1, pi2] = model.primaries.pi_p;
    let mu_s = secondary_service_rate(&model.probs, pi1, pi2, &policy).unwrap_or_else(|_| model.value(&xs));
    Solution {
        status: SolveStatus::Optimal,
        alpha: model.alpha,
        policy: Some(policy),
        mu_s_max: mu_s,
        active_constraints: active_constraints(model, &xs),
        notes,
    }
}
