//! Scenario description: timing, bandwidths, packet sizes, arrival rates and
//! the seven links of the network.

use crate::error::{check_prob, Error, Result};

/// A transmission bandwidth available to the secondary user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    /// Band of primary user 1, `W_p1`.
    P1,
    /// Band of primary user 2, `W_p2`.
    P2,
    /// Both bands combined, `W = W_p1 + W_p2`.
    Merged,
}

impl Band {
    pub fn of_primary(m: usize) -> Band {
        match m {
            1 => Band::P1,
            2 => Band::P2,
            _ => panic!("primary index must be 1 or 2, got {m}"),
        }
    }
}

/// Slot timing, bandwidths and packet sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingConfig {
    /// Slot duration in seconds.
    pub slot: f64,
    /// Sensing duration at the start of each slot, in seconds.
    pub sensing: f64,
    /// Bandwidth of primary 1 in Hz.
    pub w_p1: f64,
    /// Bandwidth of primary 2 in Hz.
    pub w_p2: f64,
    /// Packet sizes in bits.
    pub b_p1: f64,
    pub b_p2: f64,
    pub b_s: f64,
}

impl TimingConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("T", self.slot),
            ("w_p1", self.w_p1),
            ("w_p2", self.w_p2),
            ("b_p1", self.b_p1),
            ("b_p2", self.b_p2),
            ("b_s", self.b_s),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.sensing > 0.0 && self.sensing < self.slot) {
            return Err(Error::InvalidConfig(format!(
                "sensing time tau must satisfy 0 < tau < T, got tau={} T={}",
                self.sensing, self.slot
            )));
        }
        Ok(())
    }

    pub fn bandwidth(&self, band: Band) -> f64 {
        match band {
            Band::P1 => self.w_p1,
            Band::P2 => self.w_p2,
            Band::Merged => self.w_p1 + self.w_p2,
        }
    }

    /// Time left for secondary transmissions after sensing.
    pub fn secondary_airtime(&self) -> f64 {
        self.slot - self.sensing
    }
}

/// Success probabilities given outright, tagged by bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DirectProbs {
    pub wp1: Option<f64>,
    pub wp2: Option<f64>,
    pub w: Option<f64>,
}

impl DirectProbs {
    pub fn on(band: Band, p: f64) -> Self {
        let mut d = DirectProbs::default();
        *d.slot_mut(band) = Some(p);
        d
    }

    pub fn get(&self, band: Band) -> Option<f64> {
        match band {
            Band::P1 => self.wp1,
            Band::P2 => self.wp2,
            Band::Merged => self.w,
        }
    }

    fn slot_mut(&mut self, band: Band) -> &mut Option<f64> {
        match band {
            Band::P1 => &mut self.wp1,
            Band::P2 => &mut self.wp2,
            Band::Merged => &mut self.w,
        }
    }
}

/// How a link's packet success probability is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkModel {
    /// Rayleigh block fading: channel-gain variance and unit-gain SNR.
    Fading { variance: f64, snr: f64 },
    /// Probabilities asserted by the user, per bandwidth.
    Direct(DirectProbs),
}

impl LinkModel {
    pub fn validate(&self, name: &str) -> Result<()> {
        match *self {
            LinkModel::Fading { variance, snr } => {
                if !(variance.is_finite() && variance > 0.0) {
                    return Err(Error::InvalidConfig(format!("{name}: variance must be > 0, got {variance}")));
                }
                if !(snr.is_finite() && snr > 0.0) {
                    return Err(Error::InvalidConfig(format!("{name}: snr must be > 0, got {snr}")));
                }
            }
            LinkModel::Direct(d) => {
                for p in [d.wp1, d.wp2, d.w].into_iter().flatten() {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::InvalidConfig(format!("{name}: success probability {p} outside [0, 1]")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The seven links used by the protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Links {
    pub p1_pd1: LinkModel,
    pub p2_pd2: LinkModel,
    pub p1_s: LinkModel,
    pub p2_s: LinkModel,
    pub s_pd1: LinkModel,
    pub s_pd2: LinkModel,
    pub s_sd: LinkModel,
}

impl Links {
    pub fn named(&self) -> [(&'static str, &LinkModel); 7] {
        [
            ("p1_pd1", &self.p1_pd1),
            ("p2_pd2", &self.p2_pd2),
            ("p1_s", &self.p1_s),
            ("p2_s", &self.p2_s),
            ("s_pd1", &self.s_pd1),
            ("s_pd2", &self.s_pd2),
            ("s_sd", &self.s_sd),
        ]
    }
}

/// Mean Bernoulli arrival rates in packets per slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrivals {
    pub lambda_p1: f64,
    pub lambda_p2: f64,
    pub lambda_s: Option<f64>,
}

impl Arrivals {
    pub fn primary(&self, m: usize) -> f64 {
        match m {
            1 => self.lambda_p1,
            2 => self.lambda_p2,
            _ => panic!("primary index must be 1 or 2, got {m}"),
        }
    }
}

/// One complete scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub timing: TimingConfig,
    pub arrivals: Arrivals,
    pub links: Links,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        self.timing.validate()?;
        check_prob("lambda_p1", self.arrivals.lambda_p1)
            .map_err(|_| Error::InvalidConfig(format!("lambda_p1 outside [0, 1]: {}", self.arrivals.lambda_p1)))?;
        check_prob("lambda_p2", self.arrivals.lambda_p2)
            .map_err(|_| Error::InvalidConfig(format!("lambda_p2 outside [0, 1]: {}", self.arrivals.lambda_p2)))?;
        if let Some(ls) = self.arrivals.lambda_s {
            if !(0.0..=1.0).contains(&ls) {
                return Err(Error::InvalidConfig(format!("lambda_s outside [0, 1]: {ls}")));
            }
        }
        for (name, link) in self.links.named() {
            link.validate(name)?;
        }
        Ok(())
    }

    pub fn with_primary_arrivals(mut self, lambda_p1: f64, lambda_p2: f64) -> Self {
        self.arrivals.lambda_p1 = lambda_p1;
        self.arrivals.lambda_p2 = lambda_p2;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn timing() -> TimingConfig {
        TimingConfig { slot: 1e-3, sensing: 1e-4, w_p1: 2e6, w_p2: 2e6, b_p1: 1000.0, b_p2: 1000.0, b_s: 1000.0 }
    }

    #[test]
    fn sensing_must_fit_in_slot() {
        assert!(timing().validate().is_ok());
        let mut t = timing();
        t.sensing = t.slot;
        assert!(t.validate().is_err());
        t.sensing = 0.0;
        assert!(t.validate().is_err());
    }

    #[test]
    fn merged_bandwidth_is_the_sum() {
        assert_eq!(timing().bandwidth(Band::Merged), 4e6);
    }

    #[test]
    fn link_validation() {
        assert!(LinkModel::Fading { variance: 0.0, snr: 1.0 }.validate("x").is_err());
        assert!(LinkModel::Direct(DirectProbs::on(Band::P1, 1.5)).validate("x").is_err());
        assert!(LinkModel::Direct(DirectProbs::on(Band::P1, 0.5)).validate("x").is_ok());
    }
}
