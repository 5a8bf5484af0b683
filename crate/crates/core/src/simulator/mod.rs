//! Slot-by-slot simulation of the five queues.
//!
//! Each slot:
//!
//! 1. The secondary user senses which primary queues hold a packet. Every
//!    queue length used for service decisions is the one at slot start.
//! 2. Every link draws its channel state (block fading, one draw per link).
//! 3. Each busy primary transmits. On direct failure the secondary may have
//!    decoded the packet and, with probability `alpha`, admits it to its
//!    relaying queue; that ends the primary's responsibility for it.
//! 4. The secondary serves its queues on the idle bands according to the
//!    system's rule.
//! 5. Bernoulli arrivals and admitted packets join their queues; they can be
//!    served from the next slot on.
//!
//! Three systems are available. `S` follows the randomized access policy.
//! `S1` and `S2` admit every decodable packet and give the relaying queues
//! strict priority; `S2` serves the secondary's own queue only when both
//! primaries are idle and both relaying queues are empty.

pub mod probe;
pub mod streams;

use std::fmt;
use std::str::FromStr;

use crate::config::{Band, SystemConfig};
use crate::error::{Error, QueueId, Result};
use crate::rates::Policy;
use streams::{LinkSamplers, Stream, Streams};

pub use probe::{empirical_boundary, stability_probe, BoundaryOptions, BoundaryResult, ProbeOptions, RELAY_BACKOFF};

const P1: usize = 0;
const P2: usize = 1;
const S: usize = 2;
const SR1: usize = 3;
const SR2: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum System {
    S,
    S1,
    S2,
}

impl System {
    pub const ALL: [System; 3] = [System::S, System::S1, System::S2];

    pub fn name(self) -> &'static str {
        match self {
            System::S => "S",
            System::S1 => "S1",
            System::S2 => "S2",
        }
    }

    pub fn id(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(System::S),
            "S1" | "s1" => Ok(System::S1),
            "S2" | "s2" => Ok(System::S2),
            _ => Err(Error::InvalidConfig(format!("unknown system {s:?}; expected S, S1 or S2"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub system: System,
    /// Measured slots, after warmup.
    pub slots: u64,
    pub warmup: u64,
    pub seed: u64,
    pub config: SystemConfig,
    /// Access policy for `S`; ignored by `S1` and `S2`.
    pub policy: Policy,
    /// Slope threshold (packets/slot) of the drift test.
    pub drift_eps: f64,
    /// Number of batches for batch-means standard errors.
    pub batches: usize,
}

impl SimConfig {
    pub fn new(system: System, config: SystemConfig, policy: Policy, slots: u64, seed: u64) -> Self {
        SimConfig { system, slots, warmup: 0, seed, config, policy, drift_eps: 1e-4, batches: 50 }
    }

    pub fn with_warmup(mut self, warmup: u64) -> Self {
        self.warmup = warmup;
        self
    }

    /// The policy actually simulated: `S1` and `S2` admit everything.
    pub fn effective_policy(&self) -> Policy {
        match self.system {
            System::S => self.policy,
            System::S1 | System::S2 => self.policy.with_alpha(1.0, 1.0),
        }
    }
}

/// Which queue the secondary serves on which band in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Assignment {
    pub band1: Option<QueueId>,
    pub band2: Option<QueueId>,
    pub merged: Option<QueueId>,
    /// Index (1 to 4) of the both-idle event drawn by system `S`.
    pub eta_event: Option<u8>,
}

impl Assignment {
    fn serves(&self, q: QueueId) -> Option<Band> {
        if self.merged == Some(q) {
            Some(Band::Merged)
        } else if self.band1 == Some(q) {
            Some(Band::P1)
        } else if self.band2 == Some(q) {
            Some(Band::P2)
        } else {
            None
        }
    }
}

/// What happened to each queue in one slot, indexed by [`QueueId::index`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlotRecord {
    pub empty: [bool; 5],
    pub arrived: [bool; 5],
    pub departed: [bool; 5],
    /// The queue's server would have delivered a packet this slot, whether or
    /// not the queue had one.
    pub opportunity: [bool; 5],
    pub assignment: Assignment,
}

/// Queue lengths in packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimState {
    pub len: [u64; 5],
}

impl SimState {
    pub fn get(&self, q: QueueId) -> u64 {
        self.len[q.index()]
    }
}

/// The running simulation: queue state plus its random streams.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub state: SimState,
    system: System,
    policy: Policy,
    lambda: [f64; 3],
    links: LinkSamplers,
    streams: Streams,
}

impl Simulator {
    pub fn new(sim: &SimConfig) -> Result<Self> {
        sim.config.validate()?;
        let policy = sim.effective_policy();
        policy.validate()?;
        let a = &sim.config.arrivals;
        Ok(Simulator {
            state: SimState::default(),
            system: sim.system,
            policy,
            lambda: [a.lambda_p1, a.lambda_p2, a.lambda_s.unwrap_or(0.0)],
            links: LinkSamplers::new(&sim.config)?,
            streams: Streams::new(sim.seed),
        })
    }

    /// Advances one slot.
    pub fn step(&mut self) -> SlotRecord {
        let len = self.state.len;
        let mut rec = SlotRecord::default();
        for (e, l) in rec.empty.iter_mut().zip(len) {
            *e = l == 0;
        }
        let busy = [len[P1] > 0, len[P2] > 0];

        let st = &mut self.streams;
        let l = self.links;
        let d_p1 = l.p1_pd1.draw(st.get(Stream::LinkP1Pd1));
        let d_p2 = l.p2_pd2.draw(st.get(Stream::LinkP2Pd2));
        let d_p1s = l.p1_s.draw(st.get(Stream::LinkP1S));
        let d_p2s = l.p2_s.draw(st.get(Stream::LinkP2S));
        let d_spd1 = l.s_pd1.draw(st.get(Stream::LinkSPd1));
        let d_spd2 = l.s_pd2.draw(st.get(Stream::LinkSPd2));
        let d_ssd = l.s_sd.draw(st.get(Stream::LinkSSd));
        let admit = [st.uniform(Stream::Admit1), st.uniform(Stream::Admit2)];

        // Primary transmissions.
        let direct = [l.p1_pd1.succeeds(d_p1, Band::P1), l.p2_pd2.succeeds(d_p2, Band::P2)];
        let heard = [l.p1_s.succeeds(d_p1s, Band::P1), l.p2_s.succeeds(d_p2s, Band::P2)];
        let mut relayed = [false; 2];
        for i in 0..2 {
            let alpha = self.policy.alpha(i + 1);
            let admitted = !direct[i] && heard[i] && admit[i] < alpha;
            rec.opportunity[i] = direct[i] || admitted;
            if busy[i] && rec.opportunity[i] {
                rec.departed[i] = true;
                relayed[i] = admitted;
            }
        }

        // Secondary access.
        let asg = self.schedule(busy, len);
        rec.assignment = asg;
        for (q, relay_sampler, draw) in [
            (QueueId::Sr1, &l.s_pd1, d_spd1),
            (QueueId::Sr2, &l.s_pd2, d_spd2),
            (QueueId::S, &l.s_sd, d_ssd),
        ] {
            if let Some(band) = asg.serves(q) {
                let i = q.index();
                rec.opportunity[i] = relay_sampler.succeeds(draw, band);
                rec.departed[i] = rec.opportunity[i] && len[i] > 0;
            }
        }

        // Arrivals, including packets handed over by the primaries.
        for (i, s) in [(P1, Stream::ArrivalP1), (P2, Stream::ArrivalP2), (S, Stream::ArrivalS)] {
            rec.arrived[i] = self.streams.uniform(s) < self.lambda[i];
        }
        rec.arrived[SR1] = relayed[0];
        rec.arrived[SR2] = relayed[1];

        for i in 0..5 {
            self.state.len[i] = self.state.len[i] - rec.departed[i] as u64 + rec.arrived[i] as u64;
        }
        rec
    }

    fn schedule(&mut self, busy: [bool; 2], len: [u64; 5]) -> Assignment {
        let mut a = Assignment::default();
        let idle = [!busy[0], !busy[1]];
        let has = |i: usize| len[i] > 0;
        match self.system {
            System::S => {
                if idle[0] && idle[1] {
                    let u = self.streams.uniform(Stream::Schedule);
                    let eta = self.policy.eta;
                    let event = if u < eta[0] {
                        1
                    } else if u < eta[0] + eta[1] {
                        2
                    } else if u < eta[0] + eta[1] + eta[2] {
                        3
                    } else {
                        4
                    };
                    a.eta_event = Some(event);
                    match event {
                        1 => a.merged = Some(QueueId::S),
                        2 => (a.band1, a.band2) = (Some(QueueId::Sr1), Some(QueueId::S)),
                        3 => (a.band1, a.band2) = (Some(QueueId::S), Some(QueueId::Sr2)),
                        _ => (a.band1, a.band2) = (Some(QueueId::Sr1), Some(QueueId::Sr2)),
                    }
                } else if idle[0] || idle[1] {
                    let m = if idle[0] { 1 } else { 2 };
                    let u = self.streams.uniform(Stream::Schedule);
                    let q = if u < self.policy.a_s(m) { QueueId::S } else { relay_of(m) };
                    if m == 1 {
                        a.band1 = Some(q);
                    } else {
                        a.band2 = Some(q);
                    }
                }
            }
            System::S1 | System::S2 => {
                let strict = self.system == System::S2;
                let own = |relays_empty: bool| if !strict || relays_empty { Some(QueueId::S) } else { None };
                if idle[0] && idle[1] {
                    match (has(SR1), has(SR2)) {
                        (true, true) => (a.band1, a.band2) = (Some(QueueId::Sr1), Some(QueueId::Sr2)),
                        (true, false) => (a.band1, a.band2) = (Some(QueueId::Sr1), own(false)),
                        (false, true) => (a.band1, a.band2) = (own(false), Some(QueueId::Sr2)),
                        (false, false) => a.merged = Some(QueueId::S),
                    }
                } else if idle[0] || idle[1] {
                    let m = if idle[0] { 1 } else { 2 };
                    let q = if has(relay_of(m).index()) { Some(relay_of(m)) } else { own(false) };
                    if m == 1 {
                        a.band1 = q;
                    } else {
                        a.band2 = q;
                    }
                }
            }
        }
        a
    }
}

fn relay_of(m: usize) -> QueueId {
    if m == 1 {
        QueueId::Sr1
    } else {
        QueueId::Sr2
    }
}

/// Whether a queue's length trends upward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Marginal,
    Unstable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Marginal => "marginal",
            Verdict::Unstable => "unstable",
        }
    }
}

/// Mean of a per-slot quantity with its batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    const NAN: Estimate = Estimate { mean: f64::NAN, std_err: f64::NAN };

    fn from_batches(total: u64, slots: u64, batch_means: &[f64]) -> Self {
        if slots == 0 {
            return Estimate::NAN;
        }
        let mean = total as f64 / slots as f64;
        let b = batch_means.len();
        let std_err = if b >= 2 {
            let m = batch_means.iter().sum::<f64>() / b as f64;
            let var = batch_means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (b - 1) as f64;
            (var / b as f64).sqrt()
        } else {
            f64::NAN
        };
        Estimate { mean, std_err }
    }

    /// Whether `value` lies within `k` standard errors (plus a tiny absolute
    /// floor for degenerate, zero-variance estimates).
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.std_err + 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueOutcome {
    pub queue: QueueId,
    pub arrivals: u64,
    pub departures: u64,
    pub busy_slots: u64,
    pub opportunities: u64,
    pub initial_len: u64,
    pub final_len: u64,
    /// Departures per busy slot.
    pub service_rate: f64,
    /// Service opportunities per slot; estimates the analytic service rate.
    pub opportunity_rate: Estimate,
    pub arrival_rate: Estimate,
    /// Departures per slot.
    pub throughput: f64,
    /// Fraction of slots that started with the queue empty.
    pub empty_frac: Estimate,
    /// Least-squares slope of the queue length over the second half of the run.
    pub drift_slope: f64,
    /// Whether the queue was empty at some slot start in that half.
    pub emptied_late: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimStatus {
    Ok,
    NoData,
}

impl SimStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SimStatus::Ok => "ok",
            SimStatus::NoData => "no data",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub system: System,
    pub status: SimStatus,
    pub slots: u64,
    pub seed: u64,
    pub queues: [QueueOutcome; 5],
}

impl SimOutcome {
    pub fn queue(&self, q: QueueId) -> &QueueOutcome {
        &self.queues[q.index()]
    }

    pub fn all_stable(&self) -> bool {
        self.queues.iter().all(|q| q.verdict == Verdict::Stable)
    }
}

/// Running least-squares fit of queue length against slot index.
#[derive(Debug, Clone, Copy, Default)]
struct SlopeFit {
    n: f64,
    st: f64,
    sy: f64,
    stt: f64,
    sty: f64,
    hit_zero: bool,
}

impl SlopeFit {
    fn push(&mut self, t: f64, y: f64) {
        self.n += 1.0;
        self.st += t;
        self.sy += y;
        self.stt += t * t;
        self.sty += t * y;
        self.hit_zero |= y == 0.0;
    }

    fn slope(&self) -> f64 {
        let den = self.n * self.stt - self.st * self.st;
        if self.n < 2.0 || den == 0.0 {
            return 0.0;
        }
        (self.n * self.sty - self.st * self.sy) / den
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    arrivals: u64,
    departures: u64,
    busy: u64,
    opportunities: u64,
    empty: u64,
}

impl Tally {
    fn add(&mut self, rec: &SlotRecord, i: usize) {
        self.arrivals += rec.arrived[i] as u64;
        self.departures += rec.departed[i] as u64;
        self.busy += !rec.empty[i] as u64;
        self.opportunities += rec.opportunity[i] as u64;
        self.empty += rec.empty[i] as u64;
    }
}

/// Runs `sim` and summarizes every queue.
pub fn run(sim: &SimConfig) -> Result<SimOutcome> {
    let mut engine = Simulator::new(sim)?;
    for _ in 0..sim.warmup {
        engine.step();
    }
    let initial = engine.state;

    let slots = sim.slots;
    let batches = sim.batches.max(1).min(slots.max(1) as usize) as u64;
    let batch_len = (slots / batches).max(1);
    let late_start = slots / 2;

    let mut totals = [Tally::default(); 5];
    let mut batch = [Tally::default(); 5];
    let mut batch_means: [[Vec<f64>; 3]; 5] = Default::default();
    let mut fits = [SlopeFit::default(); 5];

    for t in 0..slots {
        let rec = engine.step();
        for i in 0..5 {
            totals[i].add(&rec, i);
            batch[i].add(&rec, i);
            if t >= late_start {
                // Length at the start of slot t.
                let start_len = engine.state.len[i] + rec.departed[i] as u64 - rec.arrived[i] as u64;
                fits[i].push(t as f64, start_len as f64);
            }
        }
        if (t + 1) % batch_len == 0 && (t + 1) / batch_len <= batches {
            for i in 0..5 {
                let n = batch_len as f64;
                batch_means[i][0].push(batch[i].opportunities as f64 / n);
                batch_means[i][1].push(batch[i].arrivals as f64 / n);
                batch_means[i][2].push(batch[i].empty as f64 / n);
                batch[i] = Tally::default();
            }
        }
    }

    let status = if slots == 0 { SimStatus::NoData } else { SimStatus::Ok };
    let queues = std::array::from_fn(|i| {
        let t = totals[i];
        let per_slot = |x: u64| if slots == 0 { f64::NAN } else { x as f64 / slots as f64 };
        let slope = fits[i].slope();
        // A loaded but stable queue can show a sizeable fitted slope over a
        // long excursion, so growth only counts when the queue also never
        // drained in the fitted window.
        let verdict = match (slope > sim.drift_eps, fits[i].hit_zero) {
            (false, true) => Verdict::Stable,
            (true, false) => Verdict::Unstable,
            _ => Verdict::Marginal,
        };
        QueueOutcome {
            queue: QueueId::ALL[i],
            arrivals: t.arrivals,
            departures: t.departures,
            busy_slots: t.busy,
            opportunities: t.opportunities,
            initial_len: initial.len[i],
            final_len: engine.state.len[i],
            service_rate: if t.busy == 0 { f64::NAN } else { t.departures as f64 / t.busy as f64 },
            opportunity_rate: Estimate::from_batches(t.opportunities, slots, &batch_means[i][0]),
            arrival_rate: Estimate::from_batches(t.arrivals, slots, &batch_means[i][1]),
            throughput: per_slot(t.departures),
            empty_frac: Estimate::from_batches(t.empty, slots, &batch_means[i][2]),
            drift_slope: slope,
            emptied_late: fits[i].hit_zero,
            verdict,
        }
    });
    Ok(SimOutcome { system: sim.system, status, slots, seed: sim.seed, queues })
}
