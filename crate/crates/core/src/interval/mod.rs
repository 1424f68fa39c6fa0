//! Covering systems of exact piecewise-linear maps, their discretization
//! into set-valued maps on grid cells, reduction to a cyclic permutation,
//! and the exact periodic-point search the discrete stages feed into.
//!
//! All arithmetic is over arbitrary-precision rationals; nothing is rounded.

mod discrete;
mod periodic;
mod pipeline;
mod pl;
mod random;
mod reduce;
mod system;
mod witness;

use std::collections::BTreeSet;
use std::str::FromStr;

use num_rational::BigRational;
use thiserror::Error;

pub use discrete::{discretize, orbit_closure, Discretization, OrbitClosure, SetValuedMap, StopReason};
pub use periodic::{find_periodic_point, PeriodHint, PeriodicPoint, DEFAULT_PIECE_CAP};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineError, PipelineReport, DEFAULT_N_MAX};
pub use pl::{PiecewiseLinearMap, Segment};
pub use random::random_covering_system;
pub use reduce::{reduce_to_cyclic, Partition, Reduction};
pub use system::CoveringSystem;
pub use witness::{find_witness, Witness};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("invalid map: {0}")]
    BadMap(String),
    #[error("invalid intervals: {0}")]
    BadIntervals(String),
    #[error("{x} is outside the map domain [{lo}, {hi}]")]
    OutOfDomain { x: String, lo: String, hi: String },
    #[error("covering property violated")]
    NotCovering,
    #[error("orbit closure did not settle within {n_max} steps")]
    ClosureExhausted {
        n_max: usize,
        partial: Box<Vec<BTreeSet<Rational>>>,
    },
    #[error("discrete covering fails; uncovered cells {uncovered:?}")]
    DiscreteCovering { uncovered: Vec<usize> },
    #[error("invalid partition: {0}")]
    BadPartition(String),
    #[error("reduction inconsistency: {0}")]
    Reduction(String),
    #[error("no witness among non-cut positions: {0}")]
    NoWitness(String),
    #[error("composing f^{l} needs more than {cap} pieces")]
    PieceExplosion { l: usize, cap: usize },
    #[error("no periodic point of period <= {k} found")]
    NoPeriodicPoint { k: usize },
    #[error("periodic point {x0} fails exact verification")]
    Unverified { x0: String },
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, IntervalError> {
    let t = s.trim();
    Rational::from_str(t).map_err(|_| IntervalError::Parse(s.to_string()))
}

pub(crate) fn parse_all(items: &[String]) -> Result<Vec<Rational>, IntervalError> {
    items.iter().map(|s| parse_rational(s)).collect()
}

pub(crate) fn fmt_all(items: &[Rational]) -> Vec<String> {
    items.iter().map(Rational::to_string).collect()
}

#[cfg(test)]
pub(crate) fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}
