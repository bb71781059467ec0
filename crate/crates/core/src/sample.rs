use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::MeanError;

/// A real interval with independently open or closed ends. Infinite ends are
/// always treated as open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub lo_closed: bool,
    #[serde(default)]
    pub hi_closed: bool,
}

impl Interval {
    pub const fn open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub const fn closed(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub const fn real_line() -> Self {
        Interval::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, x: f64) -> bool {
        if x.is_nan() {
            return false;
        }
        let above = if self.lo_closed && self.lo.is_finite() { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed && self.hi.is_finite() { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// Whether every point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        let lo_ok =
            self.lo > other.lo || (self.lo == other.lo && (other.lo_closed || !self.lo_closed || !self.lo.is_finite()));
        let hi_ok =
            self.hi < other.hi || (self.hi == other.hi && (other.hi_closed || !self.hi_closed || !self.hi.is_finite()));
        lo_ok && hi_ok
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed && self.lo.is_finite() { '[' } else { '(' };
        let r = if self.hi_closed && self.hi.is_finite() { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// Support tag of a sample: which values it is allowed to hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Positive,
    GreaterThanOne,
    Interval(Interval),
}

impl Domain {
    pub fn interval(&self) -> Interval {
        match self {
            Domain::Positive => Interval::open(0.0, f64::INFINITY),
            Domain::GreaterThanOne => Interval::open(1.0, f64::INFINITY),
            Domain::Interval(i) => *i,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.interval().contains(x)
    }

    pub fn is_subset_of(&self, other: &Domain) -> bool {
        self.interval().is_subset_of(&other.interval())
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Positive => write!(f, "(0, inf)"),
            Domain::GreaterThanOne => write!(f, "(1, inf)"),
            Domain::Interval(i) => write!(f, "{i}"),
        }
    }
}

/// A non-empty list of observations, every one of which lies strictly inside
/// its declared domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    domain: Domain,
}

impl Sample {
    pub fn new(values: Vec<f64>, domain: Domain) -> Result<Self, MeanError> {
        if values.is_empty() {
            return Err(MeanError::TooFewValues { required: 1, got: 0 });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, &v)| !domain.contains(v)) {
            return Err(MeanError::Domain { index, value, domain: domain.interval() });
        }
        Ok(Sample { values, domain })
    }

    pub fn positive(values: Vec<f64>) -> Result<Self, MeanError> {
        Sample::new(values, Domain::Positive)
    }

    pub fn greater_than_one(values: Vec<f64>) -> Result<Self, MeanError> {
        Sample::new(values, Domain::GreaterThanOne)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_bounds_have_no_slack() {
        assert!(Sample::greater_than_one(vec![1.0]).is_err());
        assert!(Sample::greater_than_one(vec![1.0 + f64::EPSILON]).is_ok());
        assert!(Sample::positive(vec![0.0]).is_err());
        assert!(Sample::positive(vec![f64::MIN_POSITIVE]).is_ok());
        assert!(Sample::positive(vec![f64::NAN]).is_err());
    }

    #[test]
    fn empty_sample_rejected() {
        assert_eq!(Sample::positive(vec![]).unwrap_err(), MeanError::TooFewValues { required: 1, got: 0 });
    }

    #[test]
    fn domain_error_names_offender() {
        match Sample::positive(vec![1.0, -2.0]).unwrap_err() {
            MeanError::Domain { index, value, .. } => {
                assert_eq!(index, 1);
                assert_eq!(value, -2.0);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn subset_relation() {
        assert!(Domain::GreaterThanOne.is_subset_of(&Domain::Positive));
        assert!(!Domain::Positive.is_subset_of(&Domain::GreaterThanOne));
        let closed = Domain::Interval(Interval::closed(1.0, 2.0));
        assert!(!closed.is_subset_of(&Domain::GreaterThanOne));
        assert!(closed.is_subset_of(&Domain::Positive));
        assert!(Domain::Interval(Interval::open(1.0, 2.0)).is_subset_of(&Domain::GreaterThanOne));
        assert!(Domain::Positive.is_subset_of(&Domain::Interval(Interval::real_line())));
    }
}
