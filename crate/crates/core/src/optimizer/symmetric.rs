//! Closed-form optimum when both primary users are statistically identical.
//!
//! With `pi = pi_p1 = pi_p2`, `a_s = a_s1 = a_s2` and `eta = eta2 = eta3`,
//! substitute `y = (1 - pi) a_s + pi eta` and `z = pi eta1`. Each relay row
//! becomes `y + z <= c` with `c = 1 - D`, and the feasible (y, z) set is the
//! polygon
//!
//! ```text
//! y, z >= 0,   z <= pi,   y + z <= c,   z + 2y <= 2 - pi
//! ```
//!
//! The secondary service rate is `pi (P_W z + 2 P_h y)`, linear in (y, z), so
//! the optimum is one of at most four polygon corners. Which corners exist
//! depends on how `c` compares with `pi` and with `h = 1 - pi/2`.

use super::lp::{build_lp, solution_from_policy, LPModel};
use super::{alpha_bounds, alpha_grid, check_step, pick_best, OptimizeOptions, Solution};
use crate::channel::SuccessProbs;
use crate::config::{Arrivals, Band};
use crate::error::{Error, Result};
use crate::rates::Policy;

const SYM_TOL: f64 = 1e-12;

/// Feasible-region shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    /// `c >= h`, `c <= pi`.
    A,
    /// `c >= h`, `c > pi`.
    B,
    /// `c < h`, `c <= pi`.
    C,
    /// `c < h`, `c > pi`.
    D,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricCase {
    /// Normalized relay load.
    pub d: f64,
    pub pi_p: f64,
    /// Half-band over merged-band secondary success probability.
    pub delta: f64,
    pub case_id: CaseId,
    /// Polygon corners other than the origin, as (y, z).
    pub candidate_vertices: Vec<(f64, f64)>,
}

/// Classifies the feasible region for load `d` and emptiness `pi_p`.
pub fn classify(d: f64, pi_p: f64, delta: f64) -> Result<SymmetricCase> {
    if !(0.0..1.0).contains(&d) {
        return Err(Error::RelayUnsatisfiable { relay: 1, load: d });
    }
    let pi = pi_p;
    let c = 1.0 - d;
    let h = 1.0 - pi / 2.0;
    let (case_id, candidate_vertices) = match (c >= h, c > pi) {
        (true, false) => (CaseId::A, vec![(0.0, c), (1.0 - pi + d, pi - 2.0 * d), (h, 0.0)]),
        (true, true) => (CaseId::B, vec![(0.0, pi), (c - pi, pi), (1.0 - pi + d, pi - 2.0 * d), (h, 0.0)]),
        (false, false) => (CaseId::C, vec![(0.0, c), (c, 0.0)]),
        (false, true) => (CaseId::D, vec![(0.0, pi), (c - pi, pi), (c, 0.0)]),
    };
    Ok(SymmetricCase { d, pi_p, delta, case_id, candidate_vertices })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= SYM_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Checks that both primaries see the same links and traffic.
pub fn check_symmetric(probs: &SuccessProbs, arrivals: &Arrivals) -> Result<()> {
    let pairs = [
        ("lambda_p", arrivals.lambda_p1, arrivals.lambda_p2),
        ("P_pd", probs.p1_pd1, probs.p2_pd2),
        ("P_ps", probs.p1_s, probs.p2_s),
        ("P_s->pd", probs.s_pd1, probs.s_pd2),
        ("P_s->sd half band", probs.s_sd_wp1, probs.s_sd_wp2),
    ];
    for (name, a, b) in pairs {
        if !close(a, b) {
            return Err(Error::NotSymmetric(format!("{name} differs between users: {a} vs {b}")));
        }
    }
    Ok(())
}

struct Candidate {
    policy: Policy,
    z: f64,
    value: f64,
    notes: Vec<String>,
}

/// Maps a polygon corner back to a policy.
fn vertex_policy(alpha: [f64; 2], pi: f64, d: f64, (y, z): (f64, f64)) -> Result<(Policy, Vec<String>)> {
    let pibar = 1.0 - pi;
    let c = 1.0 - d;
    let mut notes = Vec::new();
    // (a_s, eta1, eta)
    let (a_s, eta1, eta) = if z > 0.0 && y == 0.0 {
        (0.0, (z / pi).min(1.0), 0.0)
    } else if close(z, pi) {
        // eta1 = 1 leaves only the single-idle access to reach y.
        let a_s = if pibar > 0.0 { (y / pibar).clamp(0.0, 1.0) } else { 1.0 };
        (a_s, 1.0, 0.0)
    } else if z > 0.0 {
        // Corner where the relay row meets z + 2y = 2 - pi.
        let eta1 = z / pi;
        (1.0, eta1, (1.0 - eta1) / 2.0)
    } else if close(y, 1.0 - pi / 2.0) {
        (1.0, 0.0, 0.5)
    } else if pibar == 0.0 {
        (1.0, 0.0, y.min(0.5))
    } else {
        // z = 0, y = c: any eta in [lo, hi] with the matching a_s is optimal.
        let lo = ((pi - d) / pi).max(0.0);
        let hi = (c / pi).min(0.5);
        notes.push(format!("eta optimal on [{lo:.6}, {hi:.6}]; midpoint returned"));
        let eta = 0.5 * (lo + hi);
        (((c - pi * eta) / pibar).clamp(0.0, 1.0), 0.0, eta)
    };
    let eta4 = (1.0 - eta1 - 2.0 * eta).max(0.0);
    let policy = Policy::new(alpha, [a_s, a_s], [eta1, eta, eta, eta4])?;
    Ok((policy, notes))
}

/// Closed-form optimum at fixed, equal admittance factors.
pub fn symmetric_solve_at(probs: &SuccessProbs, arrivals: &Arrivals, alpha: f64, relay_backoff: f64) -> Result<Solution> {
    check_symmetric(probs, arrivals)?;
    let alpha2 = [alpha, alpha];
    let model = match build_lp(probs, arrivals, alpha2, relay_backoff) {
        Ok(m) => m,
        Err(Error::RelayUnsatisfiable { .. }) => return Ok(Solution::infeasible(alpha2)),
        Err(e) => return Err(e),
    };
    symmetric_vertex_solve(&model)
}

/// The symmetric region of a built model.
pub fn symmetric_case(model: &LPModel) -> Result<SymmetricCase> {
    let pw = model.probs.secondary(Band::Merged);
    let ph = model.probs.secondary(Band::P1);
    let delta = if pw > 0.0 { ph / pw } else { f64::INFINITY };
    classify(model.loads[0], model.primaries.pi_p[0], delta)
}

/// Evaluates every corner of the symmetric region of `model` and returns the
/// best, preferring larger `z` (merged band) and then larger `a_s` on ties.
pub fn symmetric_vertex_solve(model: &LPModel) -> Result<Solution> {
    let pi = model.primaries.pi_p[0];
    let d = model.loads[0];
    if pi == 0.0 {
        let policy = Policy::new(model.alpha, [1.0, 1.0], [1.0, 0.0, 0.0, 0.0])?;
        return Ok(solution_from_policy(model, policy, vec!["primaries never idle".into()]));
    }
    let case = symmetric_case(model)?;
    let pw = model.probs.secondary(Band::Merged);
    let ph = model.probs.secondary(Band::P1);

    let mut best: Option<Candidate> = None;
    for &(y, z) in &case.candidate_vertices {
        let (policy, notes) = vertex_policy(model.alpha, pi, d, (y, z))?;
        let value = pi * (pw * z + 2.0 * ph * y);
        let cand = Candidate { policy, z, value, notes };
        let better = match &best {
            None => true,
            Some(b) => {
                let tol = 1e-12 * b.value.abs().max(1.0);
                cand.value > b.value + tol
                    || ((cand.value - b.value).abs() <= tol
                        && (cand.z > b.z + 1e-12 || (close(cand.z, b.z) && cand.policy.a_s1 > b.policy.a_s1)))
            }
        };
        if better {
            best = Some(cand);
        }
    }
    let best = best.expect("every case has at least two corners");
    let mut notes = vec![format!("case {:?}", case.case_id)];
    notes.extend(best.notes);
    Ok(solution_from_policy(model, best.policy, notes))
}

/// Closed-form optimum searched over the equal-α grid.
pub fn symmetric_solve(probs: &SuccessProbs, arrivals: &Arrivals, opts: &OptimizeOptions) -> Result<Solution> {
    check_symmetric(probs, arrivals)?;
    check_step(opts.alpha_step)?;
    let [lo, _] = alpha_bounds(1, arrivals.lambda_p1, probs.p1_pd1, probs.p1_s)?;
    let grid = alpha_grid(lo, opts.alpha_step, &[lo]);
    let fallback = [grid[0], grid[0]];
    let results = opts.exec.map(grid, |a| symmetric_solve_at(probs, arrivals, a, opts.relay_backoff));
    let solutions = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(pick_best(solutions, fallback))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_traffic_region_is_case_a() {
        let c = classify(0.0, 1.0, 0.4).unwrap();
        assert_eq!(c.case_id, CaseId::A);
        assert!(c.candidate_vertices.contains(&(0.0, 1.0)));
        assert!(c.candidate_vertices.contains(&(0.5, 0.0)));
    }

    #[test]
    fn case_comparisons() {
        // c = 0.9, h = 0.6, pi = 0.8 -> B
        assert_eq!(classify(0.1, 0.8, 0.5).unwrap().case_id, CaseId::B);
        // c = 0.4, h = 0.6, pi = 0.8 -> C
        assert_eq!(classify(0.6, 0.8, 0.5).unwrap().case_id, CaseId::C);
        // c = 0.6, h = 0.75, pi = 0.5 -> D
        assert_eq!(classify(0.4, 0.5, 0.5).unwrap().case_id, CaseId::D);
        assert!(classify(1.0, 0.5, 0.5).is_err());
    }

    fn sym_probs(ph: f64, pw: f64) -> SuccessProbs {
        SuccessProbs {
            p1_pd1: 0.2,
            p2_pd2: 0.2,
            p1_s: 0.6,
            p2_s: 0.6,
            s_pd1: 0.6,
            s_pd2: 0.6,
            s_sd_wp1: ph,
            s_sd_wp2: ph,
            s_sd_w: pw,
        }
    }

    #[test]
    fn idle_primaries_small_delta_uses_merged_band() {
        let a = Arrivals { lambda_p1: 0.0, lambda_p2: 0.0, lambda_s: None };
        let s = symmetric_solve_at(&sym_probs(0.3, 0.9), &a, 1.0, 0.0).unwrap();
        assert_eq!(s.policy.unwrap().eta[0], 1.0);
        assert!((s.mu_s_max - 0.9).abs() < 1e-12);
    }

    #[test]
    fn idle_primaries_split_bands_only_when_delta_exceeds_one() {
        let a = Arrivals { lambda_p1: 0.0, lambda_p2: 0.0, lambda_s: None };
        // delta = 2/3: F(0, 1) = 1 beats F(1/2, 0) = delta.
        let s = symmetric_solve_at(&sym_probs(0.6, 0.9), &a, 1.0, 0.0).unwrap();
        assert_eq!(s.policy.unwrap().eta[0], 1.0);
        // delta = 1.5: the split corner wins with F = delta, i.e. mu_s = P_h.
        let s = symmetric_solve_at(&sym_probs(0.9, 0.6), &a, 1.0, 0.0).unwrap();
        let p = s.policy.unwrap();
        assert_eq!(p.eta[1], 0.5);
        assert!((s.mu_s_max - 0.9).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let mut p = sym_probs(0.5, 0.9);
        p.p2_pd2 = 0.3;
        let a = Arrivals { lambda_p1: 0.1, lambda_p2: 0.1, lambda_s: None };
        assert!(matches!(symmetric_solve_at(&p, &a, 1.0, 0.0), Err(Error::NotSymmetric(_))));
    }
}
