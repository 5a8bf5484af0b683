//! Scenario files (TOML) and the bundled parameter sets.
//!
//! ```toml
//! [timing]
//! T = 0.001
//! tau = 0.0001
//! W_p1 = 2e6
//! W_p2 = 2e6
//! b_p1 = 1000.0
//! b_p2 = 1000.0
//! b_s = 1000.0
//!
//! [arrivals]
//! lambda_p1 = 0.2
//! lambda_p2 = 0.2
//!
//! [links]
//! p1_pd1 = { success_prob = { wp1 = 0.2 } }
//! s_sd = { sigma2 = 1.0, gamma = 3.2 }
//! # ... all seven links
//! ```
//!
//! Optional sections: `[policy]` (`alpha`, `a_s`, `eta`) and `[sim]`
//! (`slots`, `seed`, `warmup`). Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::config::{Arrivals, DirectProbs, LinkModel, Links, SystemConfig, TimingConfig};
use crate::error::{Error, Result};
use crate::rates::Policy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimSettings {
    pub slots: u64,
    pub seed: u64,
    pub warmup: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: SystemConfig,
    pub policy: Option<Policy>,
    pub sim: Option<SimSettings>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTiming {
    #[serde(rename = "T")]
    slot: f64,
    tau: f64,
    #[serde(rename = "W_p1")]
    w_p1: f64,
    #[serde(rename = "W_p2")]
    w_p2: f64,
    b_p1: f64,
    b_p2: f64,
    b_s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileArrivals {
    lambda_p1: f64,
    lambda_p2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda_s: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FadingEntry {
    sigma2: f64,
    gamma: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BandProbs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    wp1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    wp2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DirectEntry {
    success_prob: BandProbs,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum FileLink {
    Fading(FadingEntry),
    Direct(DirectEntry),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileLinks {
    p1_pd1: FileLink,
    p2_pd2: FileLink,
    p1_s: FileLink,
    p2_s: FileLink,
    s_pd1: FileLink,
    s_pd2: FileLink,
    s_sd: FileLink,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FilePolicy {
    alpha: [f64; 2],
    a_s: [f64; 2],
    eta: [f64; 4],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSim {
    slots: u64,
    seed: u64,
    #[serde(default)]
    warmup: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    timing: FileTiming,
    arrivals: FileArrivals,
    links: FileLinks,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    policy: Option<FilePolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sim: Option<FileSim>,
}

impl From<FileLink> for LinkModel {
    fn from(l: FileLink) -> Self {
        match l {
            FileLink::Fading(f) => LinkModel::Fading { variance: f.sigma2, snr: f.gamma },
            FileLink::Direct(d) => {
                let p = d.success_prob;
                LinkModel::Direct(DirectProbs { wp1: p.wp1, wp2: p.wp2, w: p.w })
            }
        }
    }
}

impl From<&LinkModel> for FileLink {
    fn from(l: &LinkModel) -> Self {
        match *l {
            LinkModel::Fading { variance, snr } => FileLink::Fading(FadingEntry { sigma2: variance, gamma: snr }),
            LinkModel::Direct(d) => FileLink::Direct(DirectEntry { success_prob: BandProbs { wp1: d.wp1, wp2: d.wp2, w: d.w } }),
        }
    }
}

/// 1-based line and column of byte `offset` in `text`.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

/// Parses and validates a scenario. Errors carry the line and column of the
/// offending entry when the problem is syntactic or structural.
pub fn parse(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        match e.span() {
            Some(span) => {
                let (line, col) = line_col(text, span.start);
                Error::InvalidConfig(format!("line {line}, column {col}: {msg}"))
            }
            None => Error::InvalidConfig(msg),
        }
    })?;

    let t = file.timing;
    let l = file.links;
    let config = SystemConfig {
        timing: TimingConfig { slot: t.slot, sensing: t.tau, w_p1: t.w_p1, w_p2: t.w_p2, b_p1: t.b_p1, b_p2: t.b_p2, b_s: t.b_s },
        arrivals: Arrivals {
            lambda_p1: file.arrivals.lambda_p1,
            lambda_p2: file.arrivals.lambda_p2,
            lambda_s: file.arrivals.lambda_s,
        },
        links: Links {
            p1_pd1: l.p1_pd1.into(),
            p2_pd2: l.p2_pd2.into(),
            p1_s: l.p1_s.into(),
            p2_s: l.p2_s.into(),
            s_pd1: l.s_pd1.into(),
            s_pd2: l.s_pd2.into(),
            s_sd: l.s_sd.into(),
        },
    };
    config.validate()?;
    // Every band a link is used on must have a probability.
    crate::channel::link_table(&config)?;

    let policy = file.policy.map(|p| Policy::new(p.alpha, p.a_s, p.eta)).transpose()?;
    let sim = file.sim.map(|s| SimSettings { slots: s.slots, seed: s.seed, warmup: s.warmup });
    Ok(Scenario { config, policy, sim })
}

/// Reads and parses a scenario file.
pub fn load(path: &std::path::Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        Error::InvalidConfig(m) => Error::InvalidConfig(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Serializes a scenario; [`parse`] reads it back unchanged.
pub fn to_toml(s: &Scenario) -> String {
    let c = &s.config;
    let t = &c.timing;
    let l = &c.links;
    let file = ScenarioFile {
        timing: FileTiming { slot: t.slot, tau: t.sensing, w_p1: t.w_p1, w_p2: t.w_p2, b_p1: t.b_p1, b_p2: t.b_p2, b_s: t.b_s },
        arrivals: FileArrivals {
            lambda_p1: c.arrivals.lambda_p1,
            lambda_p2: c.arrivals.lambda_p2,
            lambda_s: c.arrivals.lambda_s,
        },
        links: FileLinks {
            p1_pd1: (&l.p1_pd1).into(),
            p2_pd2: (&l.p2_pd2).into(),
            p1_s: (&l.p1_s).into(),
            p2_s: (&l.p2_s).into(),
            s_pd1: (&l.s_pd1).into(),
            s_pd2: (&l.s_pd2).into(),
            s_sd: (&l.s_sd).into(),
        },
        policy: s.policy.map(|p| FilePolicy { alpha: [p.alpha_sr1, p.alpha_sr2], a_s: [p.a_s1, p.a_s2], eta: p.eta }),
        sim: s.sim.map(|m| FileSim { slots: m.slots, seed: m.seed, warmup: m.warmup }),
    };
    toml::to_string(&file).expect("scenario fields are all representable in TOML")
}

pub const BUNDLED: [&str; 3] = ["fig1", "fig3", "table1"];

/// Text of a scenario shipped with the crate.
pub fn bundled_text(name: &str) -> Option<&'static str> {
    match name {
        "fig1" => Some(include_str!("../scenarios/fig1.toml")),
        "fig3" => Some(include_str!("../scenarios/fig3.toml")),
        "table1" => Some(include_str!("../scenarios/table1.toml")),
        _ => None,
    }
}

/// A scenario shipped with the crate: `fig1`, `fig3` or `table1`.
pub fn bundled(name: &str) -> Result<Scenario> {
    let text = bundled_text(name)
        .ok_or_else(|| Error::InvalidConfig(format!("no bundled scenario {name:?}; known: {}", BUNDLED.join(", "))))?;
    parse(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_scenarios_parse_and_round_trip() {
        for name in BUNDLED {
            let s = bundled(name).unwrap();
            let again = parse(&to_toml(&s)).unwrap();
            assert_eq!(s, again, "{name}");
        }
    }

    #[test]
    fn unknown_key_is_rejected_with_position() {
        let text = bundled_text("fig3").unwrap().replace("[arrivals]", "[arrivals]\nlambda_q = 0.1");
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("line") && err.contains("column"), "{err}");
    }

    #[test]
    fn missing_link_is_rejected() {
        let text: String =
            bundled_text("fig3").unwrap().lines().filter(|l| !l.starts_with("s_pd2")).collect::<Vec<_>>().join("\n");
        let err = parse(&text).unwrap_err().to_string();
        assert!(err.contains("s_pd2"), "{err}");
    }

    #[test]
    fn line_col_is_one_based() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("ab", 0), (1, 1));
    }
}
