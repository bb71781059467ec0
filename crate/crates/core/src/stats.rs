use crate::numeric::pairwise_sum_map;

/// Standard normal CDF. `Φ(0) = 0.5` exactly and the two tails are computed
/// from the same `erfc` value, so `Φ(−x) = 1 − Φ(x)` up to one rounding.
pub fn normal_cdf(x: f64) -> f64 {
    let tail = 0.5 * libm::erfc(x.abs() / std::f64::consts::SQRT_2);
    if x < 0.0 {
        tail
    } else if x > 0.0 {
        1.0 - tail
    } else {
        0.5
    }
}

/// Inverse of [`normal_cdf`] by bisection to `1e-12` in `x`.
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile level must lie in (0, 1)");
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sided one-sample Kolmogorov–Smirnov distance between the empirical
/// CDF of `values` and `cdf`. `None` for empty input.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let d = sorted.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let f = cdf(x);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        acc.max(above).max(below)
    });
    Some(d.clamp(0.0, 1.0))
}

pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum_map(xs, |x| x) / xs.len() as f64
}

/// Unbiased sample variance (0 for fewer than two values).
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    pairwise_sum_map(xs, |x| (x - m) * (x - m)) / (xs.len() - 1) as f64
}
