//! Spectral efficiencies and outage-based link success probabilities.
//!
//! A packet of `b` bits sent for `duration` seconds over `W` Hz needs
//! spectral efficiency `R = b / (duration * W)`. Under Rayleigh block fading
//! with gain variance `sigma2` and unit-gain SNR `gamma`, the link is not in
//! outage with probability `exp(-(2^R - 1) / (sigma2 * gamma))`.

use crate::config::{Band, LinkModel, SystemConfig};
use crate::error::{Error, Result};

/// Spectral efficiency in bits/s/Hz. Primary links use the full slot as
/// `duration`; secondary links use the slot minus the sensing time.
pub fn spectral_efficiency(bits: f64, duration: f64, bandwidth: f64) -> Result<f64> {
    for (name, v) in [("bits", bits), ("duration", duration), ("bandwidth", bandwidth)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
        }
    }
    Ok(bits / (duration * bandwidth))
}

/// Probability that `log2(1 + gamma |h|^2) > rate` for `|h|^2` exponential
/// with mean `sigma2`.
pub fn success_prob(rate: f64, sigma2: f64, gamma: f64) -> Result<f64> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::Domain(format!("rate must be finite and >= 0, got {rate}")));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::Domain(format!("sigma2 must be > 0, got {sigma2}")));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Domain(format!("gamma must be > 0, got {gamma}")));
    }
    // exp_m1 keeps precision for small rates.
    let threshold = (rate * std::f64::consts::LN_2).exp_m1();
    Ok((-threshold / (sigma2 * gamma)).exp())
}

/// The nine success probabilities consumed by the rate formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessProbs {
    pub p1_pd1: f64,
    pub p2_pd2: f64,
    pub p1_s: f64,
    pub p2_s: f64,
    pub s_pd1: f64,
    pub s_pd2: f64,
    pub s_sd_wp1: f64,
    pub s_sd_wp2: f64,
    pub s_sd_w: f64,
}

impl SuccessProbs {
    /// Direct link of primary `m` to its destination.
    pub fn primary_direct(&self, m: usize) -> f64 {
        match m {
            1 => self.p1_pd1,
            2 => self.p2_pd2,
            _ => panic!("primary index must be 1 or 2, got {m}"),
        }
    }

    /// Link from primary `m` to the secondary user.
    pub fn primary_to_secondary(&self, m: usize) -> f64 {
        match m {
            1 => self.p1_s,
            2 => self.p2_s,
            _ => panic!("primary index must be 1 or 2, got {m}"),
        }
    }

    /// Relay link from the secondary user to primary destination `m`.
    pub fn relay(&self, m: usize) -> f64 {
        match m {
            1 => self.s_pd1,
            2 => self.s_pd2,
            _ => panic!("primary index must be 1 or 2, got {m}"),
        }
    }

    pub fn secondary(&self, band: Band) -> f64 {
        match band {
            Band::P1 => self.s_sd_wp1,
            Band::P2 => self.s_sd_wp2,
            Band::Merged => self.s_sd_w,
        }
    }
}

/// Transmission parameters of one link on one band, as seen by the
/// simulator and by [`link_table`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkUse {
    pub bits: f64,
    pub duration: f64,
    pub band: Band,
}

/// Success probability of `model` when carrying packets described by `usage`.
pub fn link_success(name: &'static str, model: &LinkModel, usage: LinkUse, cfg: &SystemConfig) -> Result<f64> {
    match *model {
        LinkModel::Fading { variance, snr } => {
            let rate = spectral_efficiency(usage.bits, usage.duration, cfg.timing.bandwidth(usage.band))?;
            success_prob(rate, variance, snr)
        }
        LinkModel::Direct(d) => d.get(usage.band).ok_or_else(|| {
            Error::InvalidConfig(format!("link {name} has no success probability for band {:?}", usage.band))
        }),
    }
}

/// Where each link transmits and with which packet size.
pub fn link_uses(cfg: &SystemConfig) -> LinkUses {
    let t = &cfg.timing;
    let primary = |m: usize| LinkUse {
        bits: if m == 1 { t.b_p1 } else { t.b_p2 },
        duration: t.slot,
        band: Band::of_primary(m),
    };
    let relay = |m: usize| LinkUse {
        bits: if m == 1 { t.b_p1 } else { t.b_p2 },
        duration: t.secondary_airtime(),
        band: Band::of_primary(m),
    };
    let own = |band: Band| LinkUse { bits: t.b_s, duration: t.secondary_airtime(), band };
    LinkUses {
        p1: primary(1),
        p2: primary(2),
        s_pd1: relay(1),
        s_pd2: relay(2),
        s_sd: [own(Band::P1), own(Band::P2), own(Band::Merged)],
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkUses {
    pub p1: LinkUse,
    pub p2: LinkUse,
    pub s_pd1: LinkUse,
    pub s_pd2: LinkUse,
    /// Secondary's own packets over `W_p1`, `W_p2` and `W`.
    pub s_sd: [LinkUse; 3],
}

/// Precomputes every success probability the rate formulas need.
pub fn link_table(cfg: &SystemConfig) -> Result<SuccessProbs> {
    cfg.validate()?;
    let u = link_uses(cfg);
    let l = &cfg.links;
    Ok(SuccessProbs {
        p1_pd1: link_success("p1_pd1", &l.p1_pd1, u.p1, cfg)?,
        p2_pd2: link_success("p2_pd2", &l.p2_pd2, u.p2, cfg)?,
        p1_s: link_success("p1_s", &l.p1_s, u.p1, cfg)?,
        p2_s: link_success("p2_s", &l.p2_s, u.p2, cfg)?,
        s_pd1: link_success("s_pd1", &l.s_pd1, u.s_pd1, cfg)?,
        s_pd2: link_success("s_pd2", &l.s_pd2, u.s_pd2, cfg)?,
        s_sd_wp1: link_success("s_sd", &l.s_sd, u.s_sd[0], cfg)?,
        s_sd_wp2: link_success("s_sd", &l.s_sd, u.s_sd[1], cfg)?,
        s_sd_w: link_success("s_sd", &l.s_sd, u.s_sd[2], cfg)?,
    })
}
