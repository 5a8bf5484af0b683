use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Names the five queues of the network in error messages and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QueueId {
    P1,
    P2,
    S,
    Sr1,
    Sr2,
}

impl QueueId {
    pub const ALL: [QueueId; 5] = [QueueId::P1, QueueId::P2, QueueId::S, QueueId::Sr1, QueueId::Sr2];

    pub fn name(self) -> &'static str {
        match self {
            QueueId::P1 => "p1",
            QueueId::P2 => "p2",
            QueueId::S => "s",
            QueueId::Sr1 => "sr1",
            QueueId::Sr2 => "sr2",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl std::fmt::Display for QueueId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("queue {queue} is unstable: arrival rate {arrival:.6} exceeds service rate {service:.6}")]
    UnstableQueue { queue: QueueId, arrival: f64, service: f64 },

    #[error("primary user {user} needs an admittance factor of at least {lower_bound:.6}, which is not available")]
    PrimaryInfeasible { user: usize, lower_bound: f64 },

    #[error("relaying queue sr{relay} cannot be stabilized: normalized load {load:.6} >= 1")]
    RelayUnsatisfiable { relay: usize, load: f64 },

    #[error("configuration is not symmetric: {0}")]
    NotSymmetric(String),

    #[error("probability {value} for {what} lies outside [0, 1]")]
    ProbabilityOutOfRange { what: &'static str, value: f64 },
}

impl Error {
    /// True for errors that mean "the requested operating point cannot be
    /// stabilized", as opposed to malformed input.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::UnstableQueue { .. } | Error::PrimaryInfeasible { .. } | Error::RelayUnsatisfiable { .. }
        )
    }
}

/// Raw probabilities may drift outside [0, 1] by rounding. Anything further
/// out than this indicates a formula bug and is reported instead of clamped.
pub(crate) const PROB_SLACK: f64 = 1e-12;

pub(crate) fn clamp_prob(what: &'static str, value: f64) -> Result<f64> {
    if !(-PROB_SLACK..=1.0 + PROB_SLACK).contains(&value) {
        return Err(Error::ProbabilityOutOfRange { what, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

pub(crate) fn check_prob(what: &'static str, value: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ProbabilityOutOfRange { what, value });
    }
    Ok(value)
}
