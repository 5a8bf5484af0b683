//! Mean service rates, arrival rates and emptiness probabilities of the five
//! queues for a fixed access policy.
//!
//! Primary queues are analysed first: their service rate depends only on the
//! admittance factor, which fixes their emptiness probability, which in turn
//! drives the relay arrival rates and every secondary service rate.

use crate::channel::{link_table, SuccessProbs};
use crate::config::{Arrivals, Band, SystemConfig};
use crate::error::{check_prob, clamp_prob, Error, QueueId, Result, PROB_SLACK};

/// Tolerance on the three normalization constraints of a policy.
pub const POLICY_SUM_TOL: f64 = 1e-9;

/// Decision variables of the secondary user.
///
/// `eta` holds the four both-bands-idle scheduling probabilities:
///
/// 1. own packet over the merged band,
/// 2. relay packet of primary 1 on band 1 plus own packet on band 2,
/// 3. own packet on band 1 plus relay packet of primary 2 on band 2,
/// 4. one relay packet on each band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Policy {
    pub alpha_sr1: f64,
    pub alpha_sr2: f64,
    pub a_s1: f64,
    pub a_sr1: f64,
    pub a_s2: f64,
    pub a_sr2: f64,
    pub eta: [f64; 4],
}

impl Policy {
    /// Builds a policy with `a_sr_m = 1 - a_s_m` and validates it.
    pub fn new(alpha: [f64; 2], a_s: [f64; 2], eta: [f64; 4]) -> Result<Self> {
        let p = Policy {
            alpha_sr1: alpha[0],
            alpha_sr2: alpha[1],
            a_s1: a_s[0],
            a_sr1: 1.0 - a_s[0],
            a_s2: a_s[1],
            a_sr2: 1.0 - a_s[1],
            eta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("alpha_sr1", self.alpha_sr1),
            ("alpha_sr2", self.alpha_sr2),
            ("a_s1", self.a_s1),
            ("a_sr1", self.a_sr1),
            ("a_s2", self.a_s2),
            ("a_sr2", self.a_sr2),
            ("eta1", self.eta[0]),
            ("eta2", self.eta[1]),
            ("eta3", self.eta[2]),
            ("eta4", self.eta[3]),
        ];
        for (name, v) in fields {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidPolicy(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if (self.a_s1 + self.a_sr1 - 1.0).abs() > POLICY_SUM_TOL {
            return Err(Error::InvalidPolicy(format!("a_s1 + a_sr1 = {} != 1", self.a_s1 + self.a_sr1)));
        }
        if (self.a_s2 + self.a_sr2 - 1.0).abs() > POLICY_SUM_TOL {
            return Err(Error::InvalidPolicy(format!("a_s2 + a_sr2 = {} != 1", self.a_s2 + self.a_sr2)));
        }
        let total: f64 = self.eta.iter().sum();
        if (total - 1.0).abs() > POLICY_SUM_TOL {
            return Err(Error::InvalidPolicy(format!("eta1..eta4 sum to {total}, expected 1")));
        }
        Ok(())
    }

    pub fn alpha(&self, m: usize) -> f64 {
        match m {
            1 => self.alpha_sr1,
            2 => self.alpha_sr2,
            _ => panic!("primary index must be 1 or 2, got {m}"),
        }
    }

    pub fn a_s(&self, m: usize) -> f64 {
        match m {
            1 => self.a_s1,
            2 => self.a_s2,
            _ => panic!("primary index must be 1 or 2, got {m}"),
        }
    }

    pub fn a_sr(&self, m: usize) -> f64 {
        match m {
            1 => self.a_sr1,
            2 => self.a_sr2,
            _ => panic!("primary index must be 1 or 2, got {m}"),
        }
    }

    /// Both-idle probability mass that serves relaying queue `m`.
    pub fn relay_eta(&self, m: usize) -> f64 {
        match m {
            1 => self.eta[1] + self.eta[3],
            2 => self.eta[2] + self.eta[3],
            _ => panic!("primary index must be 1 or 2, got {m}"),
        }
    }

    pub fn with_alpha(mut self, alpha1: f64, alpha2: f64) -> Self {
        self.alpha_sr1 = alpha1;
        self.alpha_sr2 = alpha2;
        self
    }
}

/// Mean service rate of primary queue `m`: direct success, or direct outage
/// with the packet decoded and admitted by the secondary user.
pub fn primary_service_rate(pbar_pd: f64, pbar_ps: f64, alpha: f64) -> Result<f64> {
    check_prob("pbar_pd", pbar_pd)?;
    check_prob("pbar_ps", pbar_ps)?;
    check_prob("alpha", alpha)?;
    clamp_prob("mu_p", pbar_pd + (1.0 - pbar_pd) * pbar_ps * alpha)
}

/// Probability that a queue with arrival rate `lambda` and service rate `mu`
/// is empty. `lambda == mu` (up to rounding) is the marginally stable
/// boundary and yields 0.
pub fn empty_prob(queue: QueueId, lambda: f64, mu: f64) -> Result<f64> {
    check_prob("lambda", lambda)?;
    check_prob("mu", mu)?;
    if lambda == 0.0 {
        return Ok(1.0);
    }
    if lambda > mu + PROB_SLACK {
        return Err(Error::UnstableQueue { queue, arrival: lambda, service: mu });
    }
    Ok((1.0 - lambda / mu).max(0.0))
}

/// Mean service rate of the secondary's own queue.
pub fn secondary_service_rate(probs: &SuccessProbs, pi_p1: f64, pi_p2: f64, policy: &Policy) -> Result<f64> {
    let both_idle = pi_p1 * pi_p2;
    let only_1_idle = pi_p1 * (1.0 - pi_p2);
    let only_2_idle = (1.0 - pi_p1) * pi_p2;
    let e = &policy.eta;
    // eta2 puts the relay of primary 1 on band 1, so the own packet uses band 2;
    // eta3 mirrors it.
    let mu = both_idle
        * (e[0] * probs.secondary(Band::Merged)
            + e[1] * probs.secondary(Band::P2)
            + e[2] * probs.secondary(Band::P1))
        + only_1_idle * policy.a_s1 * probs.secondary(Band::P1)
        + only_2_idle * policy.a_s2 * probs.secondary(Band::P2);
    clamp_prob("mu_s", mu)
}

/// Mean service rate of relaying queue `m`: band `m` idle, the queue chosen
/// (through `a_sr_m` if the other band is busy, through the eta events if
/// both are idle), and the relay link not in outage.
pub fn relay_service_rate(m: usize, probs: &SuccessProbs, pi_p1: f64, pi_p2: f64, policy: &Policy) -> Result<f64> {
    let (own, other) = match m {
        1 => (pi_p1, pi_p2),
        2 => (pi_p2, pi_p1),
        _ => return Err(Error::Domain(format!("relay index must be 1 or 2, got {m}"))),
    };
    let access = (1.0 - other) * policy.a_sr(m) + other * policy.relay_eta(m);
    clamp_prob("mu_sr", own * access * probs.relay(m))
}

/// Mean arrival rate of relaying queue `m`: primary `m` transmits, its direct
/// link fails, the secondary decodes, and the packet is admitted.
pub fn relay_arrival_rate(m: usize, probs: &SuccessProbs, pi_pm: f64, alpha_m: f64) -> Result<f64> {
    if m != 1 && m != 2 {
        return Err(Error::Domain(format!("relay index must be 1 or 2, got {m}")));
    }
    check_prob("pi_p", pi_pm)?;
    check_prob("alpha", alpha_m)?;
    let lambda = (1.0 - probs.primary_direct(m)) * probs.primary_to_secondary(m) * alpha_m * (1.0 - pi_pm);
    clamp_prob("lambda_sr", lambda)
}

/// Every rate of the network under one policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub mu_p1: f64,
    pub mu_p2: f64,
    pub pi_p1: f64,
    pub pi_p2: f64,
    pub lambda_sr1: f64,
    pub lambda_sr2: f64,
    pub mu_sr1: f64,
    pub mu_sr2: f64,
    pub mu_s: f64,
    /// Primary queue sits exactly on `lambda == mu`.
    pub primary_marginal: [bool; 2],
    /// `lambda_sr_m <= mu_sr_m` for each relaying queue.
    pub relay_stable: [bool; 2],
}

impl RateReport {
    pub fn mu_p(&self, m: usize) -> f64 {
        [self.mu_p1, self.mu_p2][m - 1]
    }
    pub fn pi_p(&self, m: usize) -> f64 {
        [self.pi_p1, self.pi_p2][m - 1]
    }
    pub fn lambda_sr(&self, m: usize) -> f64 {
        [self.lambda_sr1, self.lambda_sr2][m - 1]
    }
    pub fn mu_sr(&self, m: usize) -> f64 {
        [self.mu_sr1, self.mu_sr2][m - 1]
    }

    /// True when both relaying queues satisfy their rate condition.
    pub fn relays_stable(&self) -> bool {
        self.relay_stable[0] && self.relay_stable[1]
    }

    /// Named fields in a fixed order, for printing.
    pub fn fields(&self) -> [(&'static str, f64); 9] {
        [
            ("mu_p1", self.mu_p1),
            ("mu_p2", self.mu_p2),
            ("pi_p1", self.pi_p1),
            ("pi_p2", self.pi_p2),
            ("lambda_sr1", self.lambda_sr1),
            ("lambda_sr2", self.lambda_sr2),
            ("mu_sr1", self.mu_sr1),
            ("mu_sr2", self.mu_sr2),
            ("mu_s", self.mu_s),
        ]
    }
}

/// Primary-side quantities only; they depend on the admittance factors and
/// not on the access probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimaryState {
    pub mu_p: [f64; 2],
    pub pi_p: [f64; 2],
    pub lambda_sr: [f64; 2],
    pub marginal: [bool; 2],
}

pub fn primary_state(probs: &SuccessProbs, arrivals: &Arrivals, alpha: [f64; 2]) -> Result<PrimaryState> {
    let mut s = PrimaryState { mu_p: [0.0; 2], pi_p: [0.0; 2], lambda_sr: [0.0; 2], marginal: [false; 2] };
    for m in 1..=2 {
        let i = m - 1;
        let queue = if m == 1 { QueueId::P1 } else { QueueId::P2 };
        let lambda = arrivals.primary(m);
        s.mu_p[i] = primary_service_rate(probs.primary_direct(m), probs.primary_to_secondary(m), alpha[i])?;
        s.pi_p[i] = empty_prob(queue, lambda, s.mu_p[i])?;
        s.marginal[i] = lambda > 0.0 && (lambda - s.mu_p[i]).abs() <= PROB_SLACK;
        s.lambda_sr[i] = relay_arrival_rate(m, probs, s.pi_p[i], alpha[i])?;
    }
    Ok(s)
}

/// Evaluates every rate for `policy` given precomputed link probabilities.
pub fn report_from_probs(probs: &SuccessProbs, arrivals: &Arrivals, policy: &Policy) -> Result<RateReport> {
    policy.validate()?;
    let ps = primary_state(probs, arrivals, [policy.alpha_sr1, policy.alpha_sr2])?;
    let [pi1, pi2] = ps.pi_p;
    let mu_sr1 = relay_service_rate(1, probs, pi1, pi2, policy)?;
    let mu_sr2 = relay_service_rate(2, probs, pi1, pi2, policy)?;
    Ok(RateReport {
        mu_p1: ps.mu_p[0],
        mu_p2: ps.mu_p[1],
        pi_p1: pi1,
        pi_p2: pi2,
        lambda_sr1: ps.lambda_sr[0],
        lambda_sr2: ps.lambda_sr[1],
        mu_sr1,
        mu_sr2,
        mu_s: secondary_service_rate(probs, pi1, pi2, policy)?,
        primary_marginal: ps.marginal,
        relay_stable: [ps.lambda_sr[0] <= mu_sr1 + PROB_SLACK, ps.lambda_sr[1] <= mu_sr2 + PROB_SLACK],
    })
}

/// Evaluates every rate of `cfg` under `policy`.
pub fn full_report(cfg: &SystemConfig, policy: &Policy) -> Result<RateReport> {
    let probs = link_table(cfg)?;
    report_from_probs(&probs, &cfg.arrivals, policy)
}
