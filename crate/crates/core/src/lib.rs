//! Cooperative cognitive-radio MAC with two primary users and one relaying
//! secondary user.
//!
//! The crate covers the full pipeline for this protocol:
//!
//! * [`channel`] turns timing, bandwidth and fading parameters into link
//!   success probabilities.
//! * [`rates`] evaluates the mean service and arrival rates of the five
//!   queues (two primary, the secondary's own queue, two relaying queues).
//! * [`optimizer`] maximizes the secondary's stable throughput: a linear
//!   program for fixed admittance factors, a grid over those factors, and a
//!   closed-form vertex solution for symmetric primaries.
//! * [`simulator`] runs the protocol slot by slot, including the two
//!   relay-priority baselines, and probes queue stability empirically.
//! * [`region`] sweeps arrival-rate grids to trace stability-region curves.
//! * [`scenario`] and [`report`] handle scenario files and CSV output for the
//!   `cogrelay` binary.
//!
//! Data-parallel loops (admittance grids, sweeps, replicated runs) go through
//! [`exec`], which uses rayon when the `parallel` feature is enabled and
//! falls back to plain iteration otherwise.

pub mod channel;
pub mod config;
pub mod error;
pub mod exec;
pub mod optimizer;
pub mod rates;
pub mod region;
pub mod report;
pub mod scenario;
pub mod simplex;
pub mod simulator;

pub use config::{Arrivals, Band, DirectProbs, LinkModel, Links, SystemConfig, TimingConfig};
pub use error::{Error, Result};
pub use exec::Exec;
pub use rates::{Policy, RateReport};
