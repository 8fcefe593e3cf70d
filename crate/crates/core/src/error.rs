use thiserror::Error;

use crate::lattice::LatticePoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("distance to an empty set is undefined (site {0})")]
    EmptyTarget(LatticePoint),

    #[error("index pair ({h}, {k}) outside the admissible box [0, {max_h}] x [0, {max_k}]")]
    IndexOutOfRange { h: u64, k: u64, max_h: u64, max_k: u64 },

    #[error("regime error: {0}")]
    Regime(String),

    #[error("the bulky rectangle is empty")]
    EmptyRect,

    #[error("unknown polynomial `{0}`")]
    UnknownPolynomial(String),

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("search space has {sites} sites, limit is {limit}")]
    SearchSpaceTooLarge { sites: usize, limit: usize },

    #[error("cannot parse `{input}` as a rational: {reason}")]
    ParseRational { input: String, reason: String },

    #[error("{0} must be positive")]
    NonPositive(&'static str),

    #[error("integration exceeded {0} events before the end time")]
    EventLimit(usize),

    #[error("malformed site list: {0}")]
    MalformedSites(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
