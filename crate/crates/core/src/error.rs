use thiserror::Error;

use crate::sample::Interval;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeanError {
    #[error("value {value} at position {index} is outside the required domain {domain}")]
    Domain { index: usize, value: f64, domain: Interval },
    #[error("at least {required} values are required, got {got}")]
    TooFewValues { required: usize, got: usize },
    #[error("sample domain {sample} is not contained in {required}, which {kind} requires")]
    DomainMismatch { kind: String, sample: String, required: String },
    #[error("non-finite intermediate while evaluating {0}")]
    NonFinite(&'static str),
    #[error("weight sum underflowed to zero")]
    WeightUnderflow,
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    NotConverged { tolerance: f64, estimate: f64 },
    #[error("integrand produced a non-finite value at {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("moment `{0}` is unavailable")]
    MissingMoment(&'static str),
    #[error("moment `{name}` has an invalid value {value}: {reason}")]
    InvalidMoment { name: &'static str, value: f64, reason: &'static str },
    #[error("degenerate variance: the limit law is a point mass")]
    DegenerateVariance,
    #[error("generator derivative vanishes or is non-finite at {0}")]
    BadDerivative(f64),
    #[error("value {value} is outside the range {range} of the generator")]
    OutsideRange { value: f64, range: Interval },
    #[error("{0} has no limit theorem implemented for this distribution")]
    Unsupported(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StructureError {
    #[error("value {0} is outside the domain of the functional")]
    Domain(f64),
    #[error("inputs must be sorted ascending")]
    NotSorted,
    #[error("invalid probability vector: {0}")]
    ProbVector(String),
    #[error("no bisymmetry violation above {0:e} found on the grid")]
    NoWitness(f64),
    #[error(transparent)]
    Mean(#[from] MeanError),
}

#[derive(Debug, Error)]
pub enum ApportionError {
    #[error("census is empty")]
    EmptyCensus,
    #[error("census header must be `name,population`, found `{0}`")]
    BadHeader(String),
    #[error("{0} cannot be used as a two-argument apportionment method")]
    UnsupportedMethod(String),
    #[error("duplicate state name `{0}`")]
    DuplicateName(String),
    #[error("state `{name}` has invalid population `{raw}`: populations are positive integers")]
    BadPopulation { name: String, raw: String },
    #[error("house size {house} is smaller than the number of states {states}")]
    HouseTooSmall { house: u64, states: usize },
    #[error("initial allocation oversubscribes the house: {allocated} seats for a house of {house}")]
    Oversubscribed { allocated: u64, house: u64 },
    #[error("{k} remaining seats exceed the {states} states; the one-shot rule gives at most one extra seat per state, use iterative mode")]
    OneShotOverflow { k: u64, states: usize },
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
