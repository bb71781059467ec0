//! Evaluation of the mean functionals: quasi-arithmetic, Bajraktarević, Gini,
//! Hölder and the three Cauchy quotient means.
//!
//! Products and roots are formed in the log domain and every sum is a
//! pairwise sum, so samples of a million points neither overflow nor depend
//! on summation order. A sample whose values are all (exactly) equal returns
//! that value; otherwise the result is pulled back onto `[min, max]` only
//! when it strayed out by rounding.

use serde::{Deserialize, Serialize};

use crate::error::MeanError;
use crate::generator::{Generator, GeneratorSpec, WeightFunction, WeightSpec};
use crate::numeric::{all_equal, log_sum_exp_map, min_max, pairwise_sum_map, settle_into};
use crate::sample::{Domain, Interval, Sample};

fn check_in(xs: &[f64], domain: Interval) -> Result<(), MeanError> {
    match xs.iter().enumerate().find(|(_, &x)| !domain.contains(x)) {
        Some((index, &value)) => Err(MeanError::Domain { index, value, domain }),
        None => Ok(()),
    }
}

fn check_len(xs: &[f64], required: usize) -> Result<(), MeanError> {
    if xs.len() < required {
        Err(MeanError::TooFewValues { required, got: xs.len() })
    } else {
        Ok(())
    }
}

fn finish(value: f64, xs: &[f64], what: &'static str) -> Result<f64, MeanError> {
    if !value.is_finite() {
        return Err(MeanError::NonFinite(what));
    }
    let (lo, hi) = min_max(xs);
    Ok(settle_into(value, lo, hi))
}

const POSITIVE: Interval = Interval::open(0.0, f64::INFINITY);
const ABOVE_ONE: Interval = Interval::open(1.0, f64::INFINITY);

/// `g⁻¹( (1/n) Σ g(xᵢ) )`.
pub fn quasi_arithmetic_mean(g: &Generator, xs: &Sample) -> Result<f64, MeanError> {
    let xs = xs.values();
    check_in(xs, g.domain())?;
    if all_equal(xs) {
        return Ok(xs[0]);
    }
    let avg = pairwise_sum_map(xs, |x| g.eval(x)) / xs.len() as f64;
    if !avg.is_finite() {
        return Err(MeanError::NonFinite("generator average"));
    }
    finish(g.inverse(avg), xs, "quasi-arithmetic mean")
}

/// `g⁻¹( Σ p(xᵢ) g(xᵢ) / Σ p(xᵢ) )`.
pub fn bajraktarevic_mean(g: &Generator, p: &WeightFunction, xs: &Sample) -> Result<f64, MeanError> {
    let xs = xs.values();
    check_in(xs, g.domain())?;
    check_in(xs, p.domain())?;
    if let Some(&x) = xs.iter().find(|&&x| p.eval(x).is_nan() || p.eval(x) < 0.0) {
        return Err(MeanError::Parameter(format!("weight {} is not positive at {x}", p.label())));
    }
    if xs.iter().any(|&x| p.eval(x) == 0.0) {
        return Err(MeanError::WeightUnderflow);
    }
    if all_equal(xs) {
        return Ok(xs[0]);
    }
    let weight = pairwise_sum_map(xs, |x| p.eval(x));
    if weight == 0.0 {
        return Err(MeanError::WeightUnderflow);
    }
    let weighted = pairwise_sum_map(xs, |x| p.eval(x) * g.eval(x));
    if !weight.is_finite() || !weighted.is_finite() {
        return Err(MeanError::NonFinite("weighted sums"));
    }
    finish(g.inverse(weighted / weight), xs, "Bajraktarevic mean")
}

/// Gini mean `(Σxʳ / Σxˢ)^{1/(r−s)}`, or `exp(Σxˢ ln x / Σxˢ)` when `r = s`.
pub fn gini_mean(r: f64, s: f64, xs: &Sample) -> Result<f64, MeanError> {
    if !r.is_finite() || !s.is_finite() {
        return Err(MeanError::Parameter(format!("Gini parameters ({r}, {s}) must be finite")));
    }
    let xs = xs.values();
    check_in(xs, POSITIVE)?;
    if all_equal(xs) {
        return Ok(xs[0]);
    }
    let log_mean = if r != s {
        let top = log_sum_exp_map(xs, |x| r * x.ln());
        let bottom = log_sum_exp_map(xs, |x| s * x.ln());
        (top - bottom) / (r - s)
    } else {
        let shift = xs.iter().map(|&x| s * x.ln()).fold(f64::NEG_INFINITY, f64::max);
        let w = pairwise_sum_map(xs, |x| (s * x.ln() - shift).exp());
        let wy = pairwise_sum_map(xs, |x| (s * x.ln() - shift).exp() * x.ln());
        wy / w
    };
    finish(log_mean.exp(), xs, "Gini mean")
}

/// Hölder (power) mean; the geometric mean at `p = 0`.
pub fn holder_mean(p: f64, xs: &Sample) -> Result<f64, MeanError> {
    if !p.is_finite() {
        return Err(MeanError::Parameter(format!("Hölder exponent {p} must be finite")));
    }
    let xs = xs.values();
    check_in(xs, POSITIVE)?;
    if all_equal(xs) {
        return Ok(xs[0]);
    }
    let n = xs.len() as f64;
    let log_mean = if p == 0.0 {
        pairwise_sum_map(xs, f64::ln) / n
    } else {
        let spread = xs.iter().map(|&x| (p * x.ln()).abs()).fold(0.0, f64::max);
        if spread < 0.5 {
            // near p = 0: ln(1 + mean(expm1(p·ln x))) / p keeps full precision
            (pairwise_sum_map(xs, |x| (p * x.ln()).exp_m1()) / n).ln_1p() / p
        } else {
            (log_sum_exp_map(xs, |x| p * x.ln()) - n.ln()) / p
        }
    };
    finish(log_mean.exp(), xs, "Hölder mean")
}

/// Exponential Cauchy quotient (Beta-type) mean `B_n`: the `(n−1)`-th root of
/// `n·Πxᵢ / Σxᵢ`.
pub fn exp_cauchy_mean(xs: &Sample) -> Result<f64, MeanError> {
    let xs = xs.values();
    check_len(xs, 2)?;
    check_in(xs, POSITIVE)?;
    if all_equal(xs) {
        return Ok(xs[0]);
    }
    let n = xs.len() as f64;
    let sum_logs = pairwise_sum_map(xs, f64::ln);
    let log_sum = log_sum_exp_map(xs, f64::ln);
    finish(((n.ln() + sum_logs - log_sum) / (n - 1.0)).exp(), xs, "exponential Cauchy quotient mean")
}

/// Logarithmic Cauchy quotient mean `L_n`.
pub fn log_cauchy_mean(xs: &Sample) -> Result<f64, MeanError> {
    let xs = xs.values();
    check_len(xs, 2)?;
    check_in(xs, ABOVE_ONE)?;
    if all_equal(xs) {
        return Ok(xs[0]);
    }
    let m = (xs.len() - 1) as f64;
    let total = pairwise_sum_map(xs, f64::ln);
    let min_log = xs.iter().map(|&x| x.ln()).fold(f64::INFINITY, f64::min);
    // (Π_{j≠i} x_j)^{1/(n−1)} = exp((S − ln xᵢ)/(n−1)); factor out the largest.
    let top = (total - min_log) / m;
    let weighted = pairwise_sum_map(xs, |x| {
        let y = x.ln();
        ((total - y) / m - top).exp() * y
    });
    finish(top.exp() * weighted / total, xs, "logarithmic Cauchy quotient mean")
}

/// `ln P_n` in log coordinates `y = ln x`: `Σ yᵢ ln(S/yᵢ) / (n ln n)`.
/// A term with `yᵢ = 0` contributes its limit, zero.
pub(crate) fn mult_cauchy_log(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let total = pairwise_sum_map(ys, |y| y);
    let t = pairwise_sum_map(ys, |y| if y == 0.0 { 0.0 } else { y * (total / y).ln() });
    t / (n * n.ln())
}

/// Multiplicative (power) Cauchy quotient mean `P_n`.
pub fn mult_cauchy_mean(xs: &Sample) -> Result<f64, MeanError> {
    let xs = xs.values();
    check_len(xs, 2)?;
    check_in(xs, ABOVE_ONE)?;
    if all_equal(xs) {
        return Ok(xs[0]);
    }
    let ys: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    finish(mult_cauchy_log(&ys).exp(), xs, "multiplicative Cauchy quotient mean")
}

/// Which mean functional is in play.
#[derive(Debug, Clone)]
pub enum MeanKind {
    QuasiArithmetic(Generator),
    Bajraktarevic(Generator, WeightFunction),
    Gini { r: f64, s: f64 },
    Holder { p: f64 },
    ExpCauchy,
    LogCauchy,
    MultCauchy,
}

impl MeanKind {
    /// Largest sample domain the kind accepts.
    pub fn required_domain(&self) -> Domain {
        match self {
            MeanKind::QuasiArithmetic(g) => Domain::Interval(g.domain()),
            MeanKind::Bajraktarevic(g, p) => {
                let (a, b) = (g.domain(), p.domain());
                let lo = if a.lo > b.lo || (a.lo == b.lo && !a.lo_closed) {
                    (a.lo, a.lo_closed)
                } else {
                    (b.lo, b.lo_closed)
                };
                let hi = if a.hi < b.hi || (a.hi == b.hi && !a.hi_closed) {
                    (a.hi, a.hi_closed)
                } else {
                    (b.hi, b.hi_closed)
                };
                Domain::Interval(Interval { lo: lo.0, hi: hi.0, lo_closed: lo.1, hi_closed: hi.1 })
            }
            MeanKind::Gini { .. } | MeanKind::Holder { .. } | MeanKind::ExpCauchy => Domain::Positive,
            MeanKind::LogCauchy | MeanKind::MultCauchy => Domain::GreaterThanOne,
        }
    }

    pub fn min_len(&self) -> usize {
        match self {
            MeanKind::ExpCauchy | MeanKind::LogCauchy | MeanKind::MultCauchy => 2,
            _ => 1,
        }
    }

    pub fn label(&self) -> String {
        match self {
            MeanKind::QuasiArithmetic(g) => format!("quasi_arithmetic[{}]", g.label()),
            MeanKind::Bajraktarevic(g, p) => format!("bajraktarevic[{}; {}]", g.label(), p.label()),
            MeanKind::Gini { r, s } => format!("gini[{r}, {s}]"),
            MeanKind::Holder { p } => format!("holder[{p}]"),
            MeanKind::ExpCauchy => "exp_cauchy".into(),
            MeanKind::LogCauchy => "log_cauchy".into(),
            MeanKind::MultCauchy => "mult_cauchy".into(),
        }
    }
}

/// Dispatches to the evaluator for `kind` after checking that the sample's
/// declared domain fits inside what the kind accepts.
pub fn evaluate_mean(kind: &MeanKind, xs: &Sample) -> Result<f64, MeanError> {
    let required = kind.required_domain();
    if !xs.domain().is_subset_of(&required) {
        return Err(MeanError::DomainMismatch {
            kind: kind.label(),
            sample: xs.domain().to_string(),
            required: required.to_string(),
        });
    }
    match kind {
        MeanKind::QuasiArithmetic(g) => quasi_arithmetic_mean(g, xs),
        MeanKind::Bajraktarevic(g, p) => bajraktarevic_mean(g, p, xs),
        MeanKind::Gini { r, s } => gini_mean(*r, *s, xs),
        MeanKind::Holder { p } => holder_mean(*p, xs),
        MeanKind::ExpCauchy => exp_cauchy_mean(xs),
        MeanKind::LogCauchy => log_cauchy_mean(xs),
        MeanKind::MultCauchy => mult_cauchy_mean(xs),
    }
}

/// Two-argument use of a mean, as needed by apportionment priorities and
/// bisymmetry checks.
pub fn mean2(kind: &MeanKind, a: f64, b: f64) -> Result<f64, MeanError> {
    let sample = Sample::new(vec![a, b], kind.required_domain())?;
    evaluate_mean(kind, &sample)
}

/// Serializable form of [`MeanKind`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeanKindSpec {
    QuasiArithmetic { generator: GeneratorSpec },
    Bajraktarevic { generator: GeneratorSpec, weight: WeightSpec },
    Gini { r: f64, s: f64 },
    Holder { p: f64 },
    ExpCauchy,
    LogCauchy,
    MultCauchy,
}

impl MeanKindSpec {
    pub fn build(&self) -> Result<MeanKind, String> {
        Ok(match self {
            MeanKindSpec::QuasiArithmetic { generator } => MeanKind::QuasiArithmetic(generator.build()?),
            MeanKindSpec::Bajraktarevic { generator, weight } => {
                MeanKind::Bajraktarevic(generator.build()?, weight.build()?)
            }
            MeanKindSpec::Gini { r, s } if r.is_finite() && s.is_finite() => MeanKind::Gini { r: *r, s: *s },
            MeanKindSpec::Holder { p } if p.is_finite() => MeanKind::Holder { p: *p },
            MeanKindSpec::Gini { .. } | MeanKindSpec::Holder { .. } => {
                return Err("Gini/Hölder parameters must be finite".into())
            }
            MeanKindSpec::ExpCauchy => MeanKind::ExpCauchy,
            MeanKindSpec::LogCauchy => MeanKind::LogCauchy,
            MeanKindSpec::MultCauchy => MeanKind::MultCauchy,
        })
    }
}
