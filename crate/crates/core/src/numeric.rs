//! Summation kernels shared by the mean evaluators and the simulation reducers.
//!
//! Every reduction over a sample goes through [`pairwise_sum_map`], so the
//! association order (and therefore the rounding) depends only on the input
//! length, never on the caller.

const BLOCK: usize = 16;

/// Pairwise (tree) sum of `xs`, left half before right half.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    pairwise_sum_map(xs, |x| x)
}

/// Pairwise sum of `f(x)` over `xs` without materialising the mapped values.
pub fn pairwise_sum_map<F>(xs: &[f64], f: F) -> f64
where
    F: Fn(f64) -> f64 + Copy,
{
    if xs.len() <= BLOCK {
        let mut acc = 0.0;
        for &x in xs {
            acc += f(x);
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum_map(&xs[..mid], f) + pairwise_sum_map(&xs[mid..], f)
}

/// `ln Σ exp(f(x))`, shifted by the maximum so nothing overflows.
///
/// Returns `-inf` for an empty slice or when every term is `-inf`.
pub fn log_sum_exp_map<F>(xs: &[f64], f: F) -> f64
where
    F: Fn(f64) -> f64 + Copy,
{
    let max = xs.iter().map(|&x| f(x)).fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + pairwise_sum_map(xs, |x| (f(x) - max).exp()).ln()
}

/// `ln(e^a + e^b)`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

pub(crate) fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

pub(crate) fn all_equal(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

/// Pulls a value that left `[lo, hi]` by rounding alone back onto the nearest
/// end. Anything further out is returned untouched so genuine errors surface.
pub(crate) fn settle_into(value: f64, lo: f64, hi: f64) -> f64 {
    const SLACK: f64 = 1e-12;
    if value < lo && value >= lo - SLACK * lo.abs().max(f64::MIN_POSITIVE) {
        lo
    } else if value > hi && value <= hi + SLACK * hi.abs().max(f64::MIN_POSITIVE) {
        hi
    } else {
        value
    }
}
