//! Random streams and per-link outage samplers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::channel::{link_uses, spectral_efficiency, LinkUse};
use crate::config::{Band, LinkModel, SystemConfig};
use crate::error::{Error, Result};

/// One independent stream per source of randomness. New streams must be
/// appended so existing ones keep their numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    ArrivalP1,
    ArrivalP2,
    ArrivalS,
    LinkP1Pd1,
    LinkP2Pd2,
    LinkP1S,
    LinkP2S,
    LinkSPd1,
    LinkSPd2,
    LinkSSd,
    Admit1,
    Admit2,
    Schedule,
}

pub const NUM_STREAMS: usize = 13;

/// A family of ChaCha8 generators sharing one seed, one per [`Stream`].
#[derive(Debug, Clone)]
pub struct Streams {
    rngs: Vec<ChaCha8Rng>,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        let rngs = (0..NUM_STREAMS as u64)
            .map(|k| {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                r.set_stream(k);
                r
            })
            .collect();
        Streams { rngs }
    }

    pub fn get(&mut self, s: Stream) -> &mut ChaCha8Rng {
        &mut self.rngs[s as usize]
    }

    /// Uniform draw in [0, 1).
    pub fn uniform(&mut self, s: Stream) -> f64 {
        self.get(s).random::<f64>()
    }
}

/// Mixes `parts` into `master` (splitmix64 finalizer per part), for deriving
/// per-task seeds.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    let mut z = master;
    for &p in parts {
        z = z.wrapping_add(p.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// Draws one link state per slot and decides success per band.
///
/// A single draw serves every band, so the same channel realization decides
/// the outcome whichever bandwidth the transmitter picks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkSampler {
    /// Success iff `snr * |h|^2 > thresholds[band]`, `|h|^2 ~ Exp(mean variance)`.
    Fading { variance: f64, snr: f64, thresholds: [f64; 3] },
    /// Success iff `U < probs[band]`, `U` uniform.
    Direct { probs: [f64; 3] },
}

fn band_index(b: Band) -> usize {
    match b {
        Band::P1 => 0,
        Band::P2 => 1,
        Band::Merged => 2,
    }
}

impl LinkSampler {
    /// Builds a sampler for `model` used on the bands in `uses`. Bands the
    /// link never uses get probability 0 (direct) or infinite threshold.
    pub fn new(name: &str, model: &LinkModel, uses: &[LinkUse], cfg: &SystemConfig) -> Result<Self> {
        match *model {
            LinkModel::Fading { variance, snr } => {
                let mut thresholds = [f64::INFINITY; 3];
                for u in uses {
                    let r = spectral_efficiency(u.bits, u.duration, cfg.timing.bandwidth(u.band))?;
                    thresholds[band_index(u.band)] = (r * std::f64::consts::LN_2).exp_m1();
                }
                Ok(LinkSampler::Fading { variance, snr, thresholds })
            }
            LinkModel::Direct(d) => {
                let mut probs = [0.0; 3];
                for u in uses {
                    probs[band_index(u.band)] = d.get(u.band).ok_or_else(|| {
                        Error::InvalidConfig(format!("link {name} has no success probability for band {:?}", u.band))
                    })?;
                }
                Ok(LinkSampler::Direct { probs })
            }
        }
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            LinkSampler::Fading { variance, .. } => variance * rng.sample::<f64, _>(Exp1),
            LinkSampler::Direct { .. } => rng.random::<f64>(),
        }
    }

    pub fn succeeds(&self, draw: f64, band: Band) -> bool {
        let i = band_index(band);
        match self {
            LinkSampler::Fading { snr, thresholds, .. } => snr * draw > thresholds[i],
            LinkSampler::Direct { probs } => draw < probs[i],
        }
    }
}

/// Samplers for the seven links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSamplers {
    pub p1_pd1: LinkSampler,
    pub p2_pd2: LinkSampler,
    pub p1_s: LinkSampler,
    pub p2_s: LinkSampler,
    pub s_pd1: LinkSampler,
    pub s_pd2: LinkSampler,
    pub s_sd: LinkSampler,
}

impl LinkSamplers {
    pub fn new(cfg: &SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let u = link_uses(cfg);
        let l = &cfg.links;
        Ok(LinkSamplers {
            p1_pd1: LinkSampler::new("p1_pd1", &l.p1_pd1, &[u.p1], cfg)?,
            p2_pd2: LinkSampler::new("p2_pd2", &l.p2_pd2, &[u.p2], cfg)?,
            p1_s: LinkSampler::new("p1_s", &l.p1_s, &[u.p1], cfg)?,
            p2_s: LinkSampler::new("p2_s", &l.p2_s, &[u.p2], cfg)?,
            s_pd1: LinkSampler::new("s_pd1", &l.s_pd1, &[u.s_pd1], cfg)?,
            s_pd2: LinkSampler::new("s_pd2", &l.s_pd2, &[u.s_pd2], cfg)?,
            s_sd: LinkSampler::new("s_sd", &l.s_sd, &u.s_sd, cfg)?,
        })
    }
}
