//! Independent re-derivations of the rate formulas, written directly from the
//! model rather than through the crate, plus instance generators.

#![allow(dead_code)]

use cogrelay::channel::SuccessProbs;
use cogrelay::{Arrivals, Policy};
use rand::Rng;

/// Primary service rate: direct success, or relayed after admission.
pub fn mu_p(pd: f64, ps: f64, alpha: f64) -> f64 {
    pd + (1.0 - pd) * ps * alpha
}

/// (pi, lambda_sr) for one primary.
pub fn primary(pd: f64, ps: f64, alpha: f64, lambda: f64) -> (f64, f64) {
    let mu = mu_p(pd, ps, alpha);
    let pi = 1.0 - lambda / mu;
    (pi, (1.0 - pi) * (1.0 - pd) * ps * alpha)
}

/// Secondary service rate. The own packet of the second split event rides
/// on band 2 and that of the third on band 1.
pub fn mu_s(p: &SuccessProbs, pi: [f64; 2], eta: [f64; 4], a_s: [f64; 2]) -> f64 {
    let [pi1, pi2] = pi;
    pi1 * pi2 * (eta[0] * p.s_sd_w + eta[1] * p.s_sd_wp2 + eta[2] * p.s_sd_wp1)
        + pi1 * (1.0 - pi2) * a_s[0] * p.s_sd_wp1
        + (1.0 - pi1) * pi2 * a_s[1] * p.s_sd_wp2
}

pub fn mu_sr(p: &SuccessProbs, pi: [f64; 2], eta: [f64; 4], a_s: [f64; 2]) -> [f64; 2] {
    let [pi1, pi2] = pi;
    [
        pi1 * ((1.0 - pi2) * (1.0 - a_s[0]) + pi2 * (eta[1] + eta[3])) * p.s_pd1,
        pi2 * ((1.0 - pi1) * (1.0 - a_s[1]) + pi1 * (eta[2] + eta[3])) * p.s_pd2,
    ]
}

pub struct Instance {
    pub probs: SuccessProbs,
    pub arrivals: Arrivals,
    pub alpha: [f64; 2],
}

impl Instance {
    pub fn pi_and_load(&self) -> ([f64; 2], [f64; 2]) {
        let p = &self.probs;
        let a = &self.arrivals;
        let (pi1, l1) = primary(p.p1_pd1, p.p1_s, self.alpha[0], a.lambda_p1);
        let (pi2, l2) = primary(p.p2_pd2, p.p2_s, self.alpha[1], a.lambda_p2);
        ([pi1, pi2], [l1, l2])
    }
}

pub fn random_probs<R: Rng>(rng: &mut R) -> SuccessProbs {
    let mut u = || rng.random_range(0.05..0.95);
    let (wp1, wp2) = (u(), u());
    SuccessProbs {
        p1_pd1: u(),
        p2_pd2: u(),
        p1_s: u(),
        p2_s: u(),
        s_pd1: u(),
        s_pd2: u(),
        s_sd_wp1: wp1,
        s_sd_wp2: wp2,
        s_sd_w: u(),
    }
}

/// Random instance whose primaries are stable at the drawn α and whose
/// relay loads leave some room.
pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    loop {
        let probs = random_probs(rng);
        let alpha = [rng.random::<f64>(), rng.random::<f64>()];
        let cap1 = mu_p(probs.p1_pd1, probs.p1_s, alpha[0]);
        let cap2 = mu_p(probs.p2_pd2, probs.p2_s, alpha[1]);
        let arrivals = Arrivals {
            lambda_p1: rng.random::<f64>() * cap1,
            lambda_p2: rng.random::<f64>() * cap2,
            lambda_s: None,
        };
        let inst = Instance { probs, arrivals, alpha };
        let (pi, load) = inst.pi_and_load();
        let d1 = load[0] / (pi[0] * probs.s_pd1);
        let d2 = load[1] / (pi[1] * probs.s_pd2);
        if d1 < 0.9 && d2 < 0.9 {
            return inst;
        }
    }
}

/// Best objective over a grid of step `step` in every policy variable, with
/// the remaining η taking up the slack. Returns (value, argmax).
pub fn brute_force(inst: &Instance, step: f64) -> Option<(f64, [f64; 6])> {
    let (pi, load) = inst.pi_and_load();
    let n = (1.0 / step).round() as usize;
    let g = |k: usize| (k as f64 * step).min(1.0);
    let mut best: Option<(f64, [f64; 6])> = None;
    for i1 in 0..=n {
        for i2 in 0..=n - i1 {
            for i3 in 0..=n - i1 - i2 {
                let eta = [g(i1), g(i2), g(i3), g(n - i1 - i2 - i3)];
                for j1 in 0..=n {
                    for j2 in 0..=n {
                        let a_s = [g(j1), g(j2)];
                        let sr = mu_sr(&inst.probs, pi, eta, a_s);
                        if sr[0] < load[0] || sr[1] < load[1] {
                            continue;
                        }
                        let v = mu_s(&inst.probs, pi, eta, a_s);
                        if best.is_none_or(|(b, _)| v > b) {
                            best = Some((v, [eta[0], eta[1], eta[2], eta[3], a_s[0], a_s[1]]));
                        }
                    }
                }
            }
        }
    }
    best
}

/// Largest change of the objective when each variable moves by at most
/// `step`: step times the sum of the positive objective coefficients.
pub fn lipschitz_slack(inst: &Instance, step: f64) -> f64 {
    let (pi, _) = inst.pi_and_load();
    let p = &inst.probs;
    let both = pi[0] * pi[1];
    let coef = [
        both * p.s_sd_w,
        both * p.s_sd_wp2,
        both * p.s_sd_wp1,
        0.0,
        pi[0] * (1.0 - pi[1]) * p.s_sd_wp1,
        (1.0 - pi[0]) * pi[1] * p.s_sd_wp2,
    ];
    step * coef.iter().map(|c| c.max(0.0)).sum::<f64>()
}

/// Largest violation of any policy constraint, relay rows included.
pub fn max_residual(inst: &Instance, policy: &Policy) -> f64 {
    let (pi, load) = inst.pi_and_load();
    let a_s = [policy.a_s1, policy.a_s2];
    let sr = mu_sr(&inst.probs, pi, policy.eta, a_s);
    let mut r: f64 = 0.0;
    r = r.max(load[0] - sr[0]).max(load[1] - sr[1]);
    r = r.max((policy.eta.iter().sum::<f64>() - 1.0).abs());
    for v in policy.eta.iter().chain(&a_s) {
        r = r.max(-v).max(v - 1.0);
    }
    r
}

pub fn symmetric_probs(pd: f64, ps: f64, spd: f64, half: f64, merged: f64) -> SuccessProbs {
    SuccessProbs {
        p1_pd1: pd,
        p2_pd2: pd,
        p1_s: ps,
        p2_s: ps,
        s_pd1: spd,
        s_pd2: spd,
        s_sd_wp1: half,
        s_sd_wp2: half,
        s_sd_w: merged,
    }
}
