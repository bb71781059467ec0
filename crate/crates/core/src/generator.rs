//! Generators (the `f` of a quasi-arithmetic or Bajraktarević mean) and
//! weight functions (the `p`).
//!
//! A generator is carried as an explicit triple of closures: value, inverse
//! and derivative. Nothing is ever inverted numerically.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::sample::Interval;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// A strictly monotone continuous map with known inverse and derivative.
#[derive(Clone)]
pub struct Generator {
    label: String,
    eval: RealFn,
    inverse: RealFn,
    derivative: RealFn,
    domain: Interval,
    range: Interval,
    direction: Direction,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("direction", &self.direction)
            .finish()
    }
}

impl Generator {
    /// Builds a generator from user-supplied closures. The range is taken
    /// from the values at the domain ends (non-finite or NaN ends are treated
    /// as unbounded).
    pub fn new<E, I, D>(
        label: impl Into<String>,
        eval: E,
        inverse: I,
        derivative: D,
        domain: Interval,
        direction: Direction,
    ) -> Self
    where
        E: Fn(f64) -> f64 + Send + Sync + 'static,
        I: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let at = |x: f64, fallback: f64| {
            let v = eval(x);
            if v.is_nan() {
                fallback
            } else {
                v
            }
        };
        let range = match direction {
            Direction::Increasing => Interval {
                lo: at(domain.lo, f64::NEG_INFINITY),
                hi: at(domain.hi, f64::INFINITY),
                lo_closed: domain.lo_closed,
                hi_closed: domain.hi_closed,
            },
            Direction::Decreasing => Interval {
                lo: at(domain.hi, f64::NEG_INFINITY),
                hi: at(domain.lo, f64::INFINITY),
                lo_closed: domain.hi_closed,
                hi_closed: domain.lo_closed,
            },
        };
        Generator {
            label: label.into(),
            eval: Arc::new(eval),
            inverse: Arc::new(inverse),
            derivative: Arc::new(derivative),
            domain,
            range,
            direction,
        }
    }

    pub fn identity() -> Self {
        Generator::new("identity", |x| x, |y| y, |_| 1.0, Interval::real_line(), Direction::Increasing)
    }

    pub fn ln() -> Self {
        Generator::new("ln", f64::ln, f64::exp, |x| 1.0 / x, Interval::open(0.0, f64::INFINITY), Direction::Increasing)
    }

    pub fn exp() -> Self {
        Generator::new("exp", f64::exp, f64::ln, f64::exp, Interval::real_line(), Direction::Increasing)
    }

    /// `1/x` on `(0, inf)`; generates the harmonic mean.
    pub fn reciprocal() -> Self {
        Generator::new(
            "reciprocal",
            |x| 1.0 / x,
            |y| 1.0 / y,
            |x| -1.0 / (x * x),
            Interval::open(0.0, f64::INFINITY),
            Direction::Decreasing,
        )
    }

    /// `x^p` on `(0, inf)`, or `ln` when `p == 0` (the Hölder convention).
    pub fn power(p: f64) -> Self {
        if p == 0.0 {
            return Generator::ln();
        }
        let direction = if p > 0.0 { Direction::Increasing } else { Direction::Decreasing };
        Generator::new(
            format!("power({p})"),
            move |x| x.powf(p),
            move |y| y.powf(1.0 / p),
            move |x| p * x.powf(p - 1.0),
            Interval::open(0.0, f64::INFINITY),
            direction,
        )
    }

    /// `a·g + b`. Panics if `a` is zero or not finite.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        assert!(a != 0.0 && a.is_finite(), "affine factor must be finite and non-zero");
        let (e, i, d) = (self.eval.clone(), self.inverse.clone(), self.derivative.clone());
        let direction = match (self.direction, a > 0.0) {
            (dir, true) => dir,
            (Direction::Increasing, false) => Direction::Decreasing,
            (Direction::Decreasing, false) => Direction::Increasing,
        };
        Generator::new(
            format!("{a}*{}+{b}", self.label),
            move |x| a * e(x) + b,
            move |y| i((y - b) / a),
            move |x| a * d(x),
            self.domain,
            direction,
        )
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        (self.inverse)(y)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        (self.derivative)(x)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Image of the domain under the generator.
    pub fn range(&self) -> Interval {
        self.range
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Checks the round-trip and monotonicity contracts on `grid`
    /// (which must be sorted ascending and lie in the domain).
    pub fn check_on_grid(&self, grid: &[f64]) -> Result<(), String> {
        for &x in grid {
            let back = self.inverse(self.eval(x));
            if (back - x).abs() > 1e-10 * x.abs().max(1.0) {
                return Err(format!("{}: inverse(eval({x})) = {back}", self.label));
            }
        }
        for w in grid.windows(2) {
            let (a, b) = (self.eval(w[0]), self.eval(w[1]));
            let ok = match self.direction {
                Direction::Increasing => a < b,
                Direction::Decreasing => a > b,
            };
            if !ok {
                return Err(format!("{}: not strictly monotone on [{}, {}]", self.label, w[0], w[1]));
            }
        }
        Ok(())
    }
}

/// A strictly positive weight function.
#[derive(Clone)]
pub struct WeightFunction {
    label: String,
    eval: RealFn,
    domain: Interval,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction").field("label", &self.label).field("domain", &self.domain).finish()
    }
}

impl WeightFunction {
    pub fn new<E>(label: impl Into<String>, eval: E, domain: Interval) -> Self
    where
        E: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        WeightFunction { label: label.into(), eval: Arc::new(eval), domain }
    }

    /// `p ≡ 1`.
    pub fn unit() -> Self {
        WeightFunction::new("one", |_| 1.0, Interval::real_line())
    }

    /// `x^q` on `(0, inf)`.
    pub fn power(q: f64) -> Self {
        if q == 0.0 {
            return WeightFunction::new("power(0)", |_| 1.0, Interval::open(0.0, f64::INFINITY));
        }
        WeightFunction::new(format!("power({q})"), move |x| x.powf(q), Interval::open(0.0, f64::INFINITY))
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn check_on_grid(&self, grid: &[f64]) -> Result<(), String> {
        match grid.iter().find(|&&x| self.eval(x).is_nan() || self.eval(x) <= 0.0) {
            Some(x) => Err(format!("{}: weight not positive at {x}", self.label)),
            None => Ok(()),
        }
    }
}

/// Serializable description of a built-in generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Identity,
    Ln,
    Exp,
    Reciprocal,
    Power { p: f64 },
    Affine { a: f64, b: f64, base: Box<GeneratorSpec> },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Generator, String> {
        Ok(match self {
            GeneratorSpec::Identity => Generator::identity(),
            GeneratorSpec::Ln => Generator::ln(),
            GeneratorSpec::Exp => Generator::exp(),
            GeneratorSpec::Reciprocal => Generator::reciprocal(),
            GeneratorSpec::Power { p } if p.is_finite() => Generator::power(*p),
            GeneratorSpec::Power { p } => return Err(format!("power exponent {p} is not finite")),
            GeneratorSpec::Affine { a, b, base } => {
                if *a == 0.0 || !a.is_finite() || !b.is_finite() {
                    return Err(format!("affine coefficients ({a}, {b}) invalid"));
                }
                base.build()?.affine(*a, *b)
            }
        })
    }

    /// Parses the compact CLI form: `identity`, `ln`, `exp`, `reciprocal`, `power:P`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, arg) {
            ("identity" | "id", None) => Ok(GeneratorSpec::Identity),
            ("ln" | "log", None) => Ok(GeneratorSpec::Ln),
            ("exp", None) => Ok(GeneratorSpec::Exp),
            ("reciprocal" | "recip", None) => Ok(GeneratorSpec::Reciprocal),
            ("power", Some(p)) => {
                p.parse().map(|p| GeneratorSpec::Power { p }).map_err(|_| format!("bad exponent `{p}`"))
            }
            _ => Err(format!("unknown generator `{s}`")),
        }
    }
}

/// Serializable description of a built-in weight function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WeightSpec {
    One,
    Power { q: f64 },
}

impl WeightSpec {
    pub fn build(&self) -> Result<WeightFunction, String> {
        match self {
            WeightSpec::One => Ok(WeightFunction::unit()),
            WeightSpec::Power { q } if q.is_finite() => Ok(WeightFunction::power(*q)),
            WeightSpec::Power { q } => Err(format!("weight exponent {q} is not finite")),
        }
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None if s == "one" || s == "1" => Ok(WeightSpec::One),
            Some(("power", q)) => q.parse().map(|q| WeightSpec::Power { q }).map_err(|_| format!("bad exponent `{q}`")),
            _ => Err(format!("unknown weight `{s}`")),
        }
    }
}
