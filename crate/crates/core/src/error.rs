use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("a system needs at least one particle")]
    EmptySystem,

    #[error("particle {particle} out of range for a system of {n} particles")]
    ParticleOutOfRange { particle: usize, n: usize },

    #[error("self-loop on particle {0}: pairs must be distinct")]
    SelfLoop(usize),

    #[error("invalid configuration: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("no particle left in solution")]
    EmptySolution,

    #[error("histogram mass {histogram_mass} does not match {n_in_solution} particles in solution")]
    InconsistentHistogram {
        histogram_mass: usize,
        n_in_solution: usize,
    },

    #[error("exploration record too short: need {needed} steps, have {available}")]
    RecordTooShort { needed: usize, available: usize },

    #[error("logarithm argument {0} outside (0, 1)")]
    LogDomain(f64),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("no root of the fixed-point equation in (0, 1)")]
    NoRoot,

    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),

    #[error("negative concentration {value} for m = {m} at t = {t}")]
    NegativeConcentration { t: f64, m: usize, value: f64 },

    #[error("component is disconnected")]
    Disconnected,

    #[error("maximum tree size {0} exceeds the enumeration limit of 12")]
    TooLarge(usize),

    #[error("time {0} was not sampled")]
    TimeNotSampled(f64),

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("histogram cap {cap} too small for k = {k}")]
    CapTooSmall { cap: usize, k: usize },

    #[error("malformed tree code {0:?}")]
    BadTreeCode(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field,
        reason: reason.into(),
    }
}
