//! Limits, centerings, scalings and asymptotic variances of the limit
//! theorems for the mean functionals, plus the delta-method transforms they
//! are built from.

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{QuadratureError, TheoryError};
use crate::generator::Generator;
use crate::generator::WeightFunction;
use crate::quadrature::MOMENT_TOLERANCE;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Where the numbers in a [`MomentSet`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentOrigin {
    /// Closed forms, with any gaps filled by quadrature (see `quadrature_fields`).
    Analytic,
    #[default]
    UserSupplied,
    /// Estimated from simulated data.
    Empirical,
}

/// Population moments of `ξ` needed by the limit theorems. `None` marks a
/// moment that is unavailable (divergent or not applicable).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    #[serde(default)]
    pub mean_pf: Option<f64>,
    #[serde(default)]
    pub mean_p: Option<f64>,
    #[serde(default)]
    pub var_pf: Option<f64>,
    #[serde(default)]
    pub var_p: Option<f64>,
    #[serde(default)]
    pub cov_pf_p: Option<f64>,
    #[serde(default)]
    pub mean_logs: Option<f64>,
    #[serde(default)]
    pub var_logs: Option<f64>,
    #[serde(default)]
    pub mean_xi: Option<f64>,
    /// `E(ln ξ · ln ln ξ)`.
    #[serde(default)]
    pub mean_loglog: Option<f64>,
    /// `D²(ln ξ · ln ln ξ)`.
    #[serde(default)]
    pub var_loglog: Option<f64>,
    #[serde(default)]
    pub origin: MomentOrigin,
    /// Names of the fields obtained by numerical quadrature.
    #[serde(default)]
    pub quadrature_fields: Vec<String>,
}

fn need(v: Option<f64>, name: &'static str) -> Result<f64, TheoryError> {
    match v {
        None => Err(TheoryError::MissingMoment(name)),
        Some(x) if !x.is_finite() => Err(TheoryError::InvalidMoment { name, value: x, reason: "not finite" }),
        Some(x) => Ok(x),
    }
}

impl MomentSet {
    fn fields(&self) -> [(&'static str, Option<f64>); 10] {
        [
            ("mean_pf", self.mean_pf),
            ("mean_p", self.mean_p),
            ("var_pf", self.var_pf),
            ("var_p", self.var_p),
            ("cov_pf_p", self.cov_pf_p),
            ("mean_logs", self.mean_logs),
            ("var_logs", self.var_logs),
            ("mean_xi", self.mean_xi),
            ("mean_loglog", self.mean_loglog),
            ("var_loglog", self.var_loglog),
        ]
    }

    pub fn validate(&self) -> Result<(), TheoryError> {
        for (name, v) in self.fields() {
            if let Some(x) = v {
                if !x.is_finite() {
                    return Err(TheoryError::InvalidMoment { name, value: x, reason: "not finite" });
                }
            }
        }
        for (name, v) in [
            ("var_pf", self.var_pf),
            ("var_p", self.var_p),
            ("var_logs", self.var_logs),
            ("var_loglog", self.var_loglog),
        ] {
            if let Some(x) = v {
                if x < 0.0 {
                    return Err(TheoryError::InvalidMoment { name, value: x, reason: "negative variance" });
                }
            }
        }
        if let (Some(c), Some(a), Some(b)) = (self.cov_pf_p, self.var_pf, self.var_p) {
            if c.abs() > (a * b).sqrt() + 1e-12 {
                return Err(TheoryError::InvalidMoment {
                    name: "cov_pf_p",
                    value: c,
                    reason: "exceeds the Cauchy-Schwarz bound",
                });
            }
        }
        Ok(())
    }

    /// Names of the moments that are present.
    pub fn present_fields(&self) -> Vec<&'static str> {
        self.fields().iter().filter(|(_, v)| v.is_some()).map(|(n, _)| *n).collect()
    }

    /// `self` on top of `base`: present fields of `self` win, and the result
    /// is marked user-supplied when `self` contributes anything.
    pub fn overlaid_on(&self, base: MomentSet) -> MomentSet {
        let mine = self.present_fields();
        if mine.is_empty() {
            return base;
        }
        let mut out = self.clone().merged_with(&base);
        out.origin = MomentOrigin::UserSupplied;
        out.quadrature_fields = base.quadrature_fields.into_iter().filter(|f| !mine.contains(&f.as_str())).collect();
        out
    }

    /// Fields of `other` fill the gaps of `self`.
    pub fn merged_with(mut self, other: &MomentSet) -> MomentSet {
        macro_rules! fill {
            ($($f:ident),*) => {$( if self.$f.is_none() { self.$f = other.$f; } )*};
        }
        fill!(mean_pf, mean_p, var_pf, var_p, cov_pf_p, mean_logs, var_logs, mean_xi, mean_loglog, var_loglog);
        for f in &other.quadrature_fields {
            if !self.quadrature_fields.contains(f) {
                self.quadrature_fields.push(f.clone());
            }
        }
        self
    }
}

/// Which statistic the limit theorem is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// The mean `M_n` itself.
    Mean,
    /// `ln M_n`.
    LogMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    SqrtN,
    LnN,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Centering {
    /// Center at `limit`.
    Constant,
    /// Center at `limit + c / ln n`.
    ConstantPlusCOverLnN { c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spread {
    AsymptoticVariance(f64),
    /// `scaling · (statistic − limit)` tends to this constant.
    LimitConstant(f64),
    /// Point-mass limit law.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltParams {
    pub statistic: Statistic,
    pub limit: f64,
    pub scaling: Scaling,
    pub centering: Centering,
    pub spread: Spread,
}

impl CltParams {
    fn root_n(limit: f64, variance: f64) -> CltParams {
        let spread = if variance > 0.0 { Spread::AsymptoticVariance(variance) } else { Spread::Degenerate };
        CltParams { statistic: Statistic::Mean, limit, scaling: Scaling::SqrtN, centering: Centering::Constant, spread }
    }

    /// Only the almost-sure limit is known; the spread is left degenerate.
    pub(crate) fn limit_only(limit: f64) -> CltParams {
        CltParams::root_n(limit, 0.0)
    }

    pub fn asym_variance(&self) -> Option<f64> {
        match self.spread {
            Spread::AsymptoticVariance(v) => Some(v),
            _ => None,
        }
    }

    pub fn limit_constant(&self) -> Option<f64> {
        match self.spread {
            Spread::LimitConstant(c) => Some(c),
            _ => None,
        }
    }

    /// Centering of the statistic at sample size `n`.
    pub fn centering_at(&self, n: usize) -> f64 {
        match self.centering {
            Centering::Constant => self.limit,
            Centering::ConstantPlusCOverLnN { c } => self.limit + c / (n as f64).ln(),
        }
    }

    pub fn scale(&self, n: usize) -> f64 {
        match self.scaling {
            Scaling::SqrtN => (n as f64).sqrt(),
            Scaling::LnN => (n as f64).ln(),
        }
    }

    pub fn validate(&self) -> Result<(), TheoryError> {
        if !self.limit.is_finite() {
            return Err(TheoryError::InvalidMoment { name: "limit", value: self.limit, reason: "not finite" });
        }
        match self.spread {
            Spread::AsymptoticVariance(v) if !(v > 0.0 && v.is_finite()) => Err(TheoryError::InvalidMoment {
                name: "asym_variance",
                value: v,
                reason: "must be positive and finite",
            }),
            Spread::LimitConstant(c) if !c.is_finite() => {
                Err(TheoryError::InvalidMoment { name: "limit_constant", value: c, reason: "not finite" })
            }
            _ => Ok(()),
        }
    }
}

/// A differentiable real map, as consumed by [`delta_method`].
pub trait DifferentiableMap {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
}

impl DifferentiableMap for Generator {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn derivative(&self, x: f64) -> f64 {
        Generator::derivative(self, x)
    }
}

/// `x ↦ eˣ`.
pub struct ExpMap;

impl DifferentiableMap for ExpMap {
    fn value(&self, x: f64) -> f64 {
        x.exp()
    }

    fn derivative(&self, x: f64) -> f64 {
        x.exp()
    }
}

/// `(g(μ), g′(μ)² · variance)`.
pub fn delta_method(mu: f64, variance: f64, g: &dyn DifferentiableMap) -> Result<(f64, f64), TheoryError> {
    let d = g.derivative(mu);
    if !d.is_finite() {
        return Err(TheoryError::BadDerivative(mu));
    }
    Ok((g.value(mu), d * d * variance))
}

/// Delta method for the ratio map `(x, y) ↦ x/y` at means `(a, b)` with
/// covariance matrix `[[v1, cov], [cov, v2]]`.
pub fn ratio_delta_method(a: f64, b: f64, v1: f64, v2: f64, cov: f64) -> Result<(f64, f64), TheoryError> {
    if b == 0.0 || !b.is_finite() {
        return Err(TheoryError::InvalidMoment {
            name: "mean_p",
            value: b,
            reason: "ratio denominator must be non-zero",
        });
    }
    let var = v1 / (b * b) - 2.0 * a * cov / (b * b * b) + a * a * v2 / (b * b * b * b);
    Ok((a / b, var))
}

/// Kolmogorov expected value `g⁻¹(E f(ξ))`.
pub fn kolmogorov_expectation(g: &Generator, mean_f: f64) -> Result<f64, TheoryError> {
    let range = g.range();
    if !mean_f.is_finite() || !range.contains(mean_f) {
        return Err(TheoryError::OutsideRange { value: mean_f, range });
    }
    Ok(g.inverse(mean_f))
}

fn derivative_at(g: &Generator, limit: f64) -> Result<f64, TheoryError> {
    let d = g.derivative(limit);
    if d == 0.0 || !d.is_finite() {
        Err(TheoryError::BadDerivative(limit))
    } else {
        Ok(d)
    }
}

/// CLT for the quasi-arithmetic mean: limit `g⁻¹(E g(ξ))`, variance
/// `D²(g(ξ)) / g′(limit)²`.
pub fn quasi_arithmetic_clt_params(g: &Generator, mean_f: f64, var_f: f64) -> Result<CltParams, TheoryError> {
    let limit = kolmogorov_expectation(g, mean_f)?;
    let d = derivative_at(g, limit)?;
    Ok(CltParams::root_n(limit, var_f / (d * d)))
}

/// CLT for the Bajraktarević mean with generator `g`; the weight enters
/// through the `p`-moments of `m`.
pub fn bajraktarevic_clt_params(g: &Generator, m: &MomentSet) -> Result<CltParams, TheoryError> {
    let mean_p = need(m.mean_p, "mean_p")?;
    if mean_p <= 0.0 {
        return Err(TheoryError::InvalidMoment { name: "mean_p", value: mean_p, reason: "must be positive" });
    }
    let (ratio, ratio_var) = ratio_delta_method(
        need(m.mean_pf, "mean_pf")?,
        mean_p,
        need(m.var_pf, "var_pf")?,
        need(m.var_p, "var_p")?,
        need(m.cov_pf_p, "cov_pf_p")?,
    )?;
    let limit = kolmogorov_expectation(g, ratio)?;
    let d = derivative_at(g, limit)?;
    Ok(CltParams::root_n(limit, ratio_var / (d * d)))
}

/// Geometric-mean CLT: limit `e^{E ln ξ}`, variance `D²(ln ξ) e^{2 E ln ξ}`.
pub fn geometric_clt_params(m: &MomentSet) -> Result<CltParams, TheoryError> {
    let mu = need(m.mean_logs, "mean_logs")?;
    let v = need(m.var_logs, "var_logs")?;
    if v <= 0.0 {
        return Err(TheoryError::DegenerateVariance);
    }
    let (limit, variance) = delta_method(mu, v, &ExpMap)?;
    Ok(CltParams::root_n(limit, variance))
}

/// `B_n` behaves like the geometric mean once `E ξ < ∞`.
pub fn exp_cauchy_clt_params(m: &MomentSet) -> Result<CltParams, TheoryError> {
    need(m.mean_xi, "mean_xi")?;
    geometric_clt_params(m)
}

/// `L_n` behaves like the geometric mean once `E ξ < ∞`; a point-mass law
/// is reported as degenerate rather than as an error.
pub fn log_cauchy_clt_params(m: &MomentSet) -> Result<CltParams, TheoryError> {
    let mean_xi = need(m.mean_xi, "mean_xi")?;
    if need(m.var_logs, "var_logs")? == 0.0 {
        // ξ is almost surely constant, so E ξ is exact where exp(E ln ξ) may round
        return Ok(CltParams::root_n(mean_xi, 0.0));
    }
    geometric_clt_params(m)
}

/// Constant `K` with `ln n · (P_n − e^{E ln ξ}) → K` almost surely:
/// `K = e^{E ln ξ} (ln(E ln ξ) E ln ξ − E(ln ξ ln ln ξ))`.
pub fn mult_cauchy_limit_constant(m: &MomentSet) -> Result<f64, TheoryError> {
    let mu = need(m.mean_logs, "mean_logs")?;
    if mu <= 0.0 {
        return Err(TheoryError::InvalidMoment { name: "mean_logs", value: mu, reason: "must be positive" });
    }
    let ll = need(m.mean_loglog, "mean_loglog")?;
    Ok(mu.exp() * (mu.ln() * mu - ll))
}

/// The `ln n` regime of `P_n` as [`CltParams`].
pub fn mult_cauchy_const_params(m: &MomentSet) -> Result<CltParams, TheoryError> {
    let k = mult_cauchy_limit_constant(m)?;
    Ok(CltParams {
        statistic: Statistic::Mean,
        limit: need(m.mean_logs, "mean_logs")?.exp(),
        scaling: Scaling::LnN,
        centering: Centering::Constant,
        spread: Spread::LimitConstant(k),
    })
}

/// CLT for `ln P_n`: centering `E ln ξ + c/ln n` with
/// `c = ln(E ln ξ) E ln ξ − E(ln ξ ln ln ξ)`, variance `D²(ln ξ)`.
pub fn mult_cauchy_clt_params(m: &MomentSet) -> Result<CltParams, TheoryError> {
    let vll = need(m.var_loglog, "var_loglog")?;
    if vll <= 0.0 {
        return Err(TheoryError::DegenerateVariance);
    }
    let mu = need(m.mean_logs, "mean_logs")?;
    if mu <= 0.0 {
        return Err(TheoryError::InvalidMoment { name: "mean_logs", value: mu, reason: "must be positive" });
    }
    let v = need(m.var_logs, "var_logs")?;
    if v <= 0.0 {
        return Err(TheoryError::DegenerateVariance);
    }
    let c = mu.ln() * mu - need(m.mean_loglog, "mean_loglog")?;
    Ok(CltParams {
        statistic: Statistic::LogMean,
        limit: mu,
        scaling: Scaling::SqrtN,
        centering: Centering::ConstantPlusCOverLnN { c },
        spread: Spread::AsymptoticVariance(v),
    })
}

/// `y ln y`, extended by its limit 0 at `y = 0`.
fn y_ln_y(y: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else {
        y * y.ln()
    }
}

/// Tolerance tried first for the weighted moments, whose combination in the
/// ratio variance cancels when the generator carries a large offset.
const WEIGHTED_TOLERANCE: f64 = 1e-13;

struct Quad<'a> {
    dist: &'a DistributionSpec,
    fields: Vec<String>,
    tight: bool,
}

impl Quad<'_> {
    fn new(dist: &DistributionSpec, tight: bool) -> Quad<'_> {
        Quad { dist, fields: Vec::new(), tight }
    }

    fn expect<H: Fn(f64) -> f64>(&self, h: H) -> Result<f64, TheoryError> {
        if self.tight {
            match self.dist.expectation(&h, WEIGHTED_TOLERANCE) {
                Err(QuadratureError::NotConverged { .. }) => {}
                other => return Ok(other?),
            }
        }
        Ok(self.dist.expectation(h, MOMENT_TOLERANCE)?)
    }

    fn mean_var<H: Fn(f64) -> f64 + Copy>(
        &mut self,
        h: H,
        mean_name: &str,
        var_name: &str,
    ) -> Result<(f64, f64), TheoryError> {
        let m = self.expect(h)?;
        let v = self.expect(|x| (h(x) - m).powi(2))?.max(0.0);
        self.fields.push(mean_name.into());
        self.fields.push(var_name.into());
        Ok((m, v))
    }

    fn mean<H: Fn(f64) -> f64>(&mut self, h: H, name: &str) -> Result<f64, TheoryError> {
        let m = self.expect(h)?;
        self.fields.push(name.into());
        Ok(m)
    }
}

/// Log-scale moments of `dist`: closed forms where known, quadrature (to
/// absolute tolerance 1e-9, flagged in `quadrature_fields`) otherwise.
/// Divergent moments are left unavailable.
pub fn analytic_moments(dist: &DistributionSpec) -> Result<MomentSet, TheoryError> {
    dist.validate().map_err(TheoryError::Unsupported)?;
    let mut q = Quad::new(dist, false);
    let mut m = MomentSet { origin: MomentOrigin::Analytic, ..MomentSet::default() };
    match *dist {
        DistributionSpec::ExpLog { lambda } => {
            // η = T/λ with T ~ Exp(1); E T² ln T = Γ′(3), E T² ln² T = Γ″(3).
            let ln_l = lambda.ln();
            let g1 = 3.0 - 2.0 * EULER_GAMMA;
            let g2 = 2.0 * ((1.5 - EULER_GAMMA).powi(2) + std::f64::consts::PI.powi(2) / 6.0 - 1.25);
            let mean_ll = (1.0 - EULER_GAMMA - ln_l) / lambda;
            let second = (g2 - 2.0 * ln_l * g1 + 2.0 * ln_l * ln_l) / (lambda * lambda);
            m.mean_logs = Some(1.0 / lambda);
            m.var_logs = Some(1.0 / (lambda * lambda));
            m.mean_xi = (lambda > 1.0).then(|| lambda / (lambda - 1.0));
            m.mean_loglog = Some(mean_ll);
            m.var_loglog = Some(second - mean_ll * mean_ll);
        }
        DistributionSpec::LogNormalBase { mu, sigma } => {
            m.mean_logs = Some(mu);
            m.var_logs = Some(sigma * sigma);
            m.mean_xi = Some((mu + 0.5 * sigma * sigma).exp());
        }
        DistributionSpec::ShiftedLogNormal { mu, sigma } => {
            m.mean_xi = Some(1.0 + (mu + 0.5 * sigma * sigma).exp());
            let (ml, vl) = q.mean_var(f64::ln, "mean_logs", "var_logs")?;
            let (mll, vll) = q.mean_var(|x| y_ln_y(x.ln()), "mean_loglog", "var_loglog")?;
            m.mean_logs = Some(ml);
            m.var_logs = Some(vl);
            m.mean_loglog = Some(mll);
            m.var_loglog = Some(vll);
        }
        DistributionSpec::UniformInterval { a, b } => {
            let w = b - a;
            let f1 = |x: f64| x * x.ln() - x;
            let f2 = |x: f64| x * (x.ln().powi(2) - 2.0 * x.ln() + 2.0);
            let ml = (f1(b) - f1(a)) / w;
            m.mean_xi = Some(0.5 * (a + b));
            m.mean_logs = Some(ml);
            m.var_logs = Some(((f2(b) - f2(a)) / w - ml * ml).max(0.0));
            if a >= 1.0 {
                let (mll, vll) = q.mean_var(|x| y_ln_y(x.ln()), "mean_loglog", "var_loglog")?;
                m.mean_loglog = Some(mll);
                m.var_loglog = Some(vll);
            }
        }
        DistributionSpec::PointMass { c } => {
            m.mean_xi = Some(c);
            m.mean_logs = Some(c.ln());
            m.var_logs = Some(0.0);
            if c > 1.0 {
                m.mean_loglog = Some(y_ln_y(c.ln()));
                m.var_loglog = Some(0.0);
            }
        }
        DistributionSpec::ExpNegLomax { alpha } => {
            m.mean_logs = (alpha > 1.0).then(|| -1.0 / (alpha - 1.0));
            m.var_logs = (alpha > 2.0).then(|| alpha / ((alpha - 1.0).powi(2) * (alpha - 2.0)));
            m.mean_xi = Some(q.mean(|x| x, "mean_xi")?);
        }
        DistributionSpec::ExpLomax { alpha } => {
            m.mean_logs = (alpha > 1.0).then(|| 1.0 / (alpha - 1.0));
            m.var_logs = (alpha > 2.0).then(|| alpha / ((alpha - 1.0).powi(2) * (alpha - 2.0)));
            // E ξ = E e^η diverges for every α. The loglog moments exist for
            // α > 1 (mean) and α > 2 (variance) but their tails are heavy, so
            // a quadrature that does not converge leaves them unavailable.
            if alpha > 1.0 {
                if let Ok(mll) = q.mean(|x| y_ln_y(x.ln()), "mean_loglog") {
                    m.mean_loglog = Some(mll);
                    if alpha > 2.0 {
                        if let Ok(s) = q.mean(|x| (y_ln_y(x.ln()) - mll).powi(2), "var_loglog") {
                            m.var_loglog = Some(s);
                        }
                    }
                }
            }
        }
    }
    m.quadrature_fields = q.fields;
    Ok(m)
}

/// The `p`- and `pf`-moments for generator `g` and weight `p` under `dist`,
/// by quadrature. `p = None` means `p ≡ 1`, whose moments are filled in
/// exactly.
pub fn weighted_moments(
    dist: &DistributionSpec,
    g: &Generator,
    p: Option<&WeightFunction>,
) -> Result<MomentSet, TheoryError> {
    let mut q = Quad::new(dist, true);
    let mut m = MomentSet { origin: MomentOrigin::Analytic, ..MomentSet::default() };
    match p {
        None => {
            let (mf, vf) = q.mean_var(|x| g.eval(x), "mean_pf", "var_pf")?;
            m.mean_pf = Some(mf);
            m.var_pf = Some(vf);
            m.mean_p = Some(1.0);
            m.var_p = Some(0.0);
            m.cov_pf_p = Some(0.0);
        }
        Some(w) => {
            let (mf, vf) = q.mean_var(|x| w.eval(x) * g.eval(x), "mean_pf", "var_pf")?;
            let (mp, vp) = q.mean_var(|x| w.eval(x), "mean_p", "var_p")?;
            let cov = q.mean(|x| (w.eval(x) * g.eval(x) - mf) * (w.eval(x) - mp), "cov_pf_p")?;
            m.mean_pf = Some(mf);
            m.var_pf = Some(vf);
            m.mean_p = Some(mp);
            m.var_p = Some(vp);
            m.cov_pf_p = Some(cov);
        }
    }
    if !matches!(dist, DistributionSpec::PointMass { .. }) {
        m.quadrature_fields = q.fields;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    fn logs(mu: f64, v: f64) -> MomentSet {
        MomentSet { mean_logs: Some(mu), var_logs: Some(v), mean_xi: Some(1.0), ..Default::default() }
    }

    #[test]
    fn kolmogorov_examples() {
        assert_eq!(kolmogorov_expectation(&Generator::identity(), 3.0).unwrap(), 3.0);
        assert_eq!(kolmogorov_expectation(&Generator::ln(), 1.0).unwrap(), E);
        assert_eq!(kolmogorov_expectation(&Generator::power(2.0), 4.0).unwrap(), 2.0);
        assert!(matches!(kolmogorov_expectation(&Generator::power(2.0), -1.0), Err(TheoryError::OutsideRange { .. })));
    }

    #[test]
    fn ordinary_clt() {
        let m = MomentSet {
            mean_pf: Some(1.5),
            var_pf: Some(0.7),
            mean_p: Some(1.0),
            var_p: Some(0.0),
            cov_pf_p: Some(0.0),
            ..Default::default()
        };
        let c = bajraktarevic_clt_params(&Generator::identity(), &m).unwrap();
        assert_eq!(c.limit, 1.5);
        assert_eq!(c.asym_variance(), Some(0.7));
    }

    #[test]
    fn lognormal_log_generator() {
        let d = DistributionSpec::LogNormalBase { mu: 0.0, sigma: 0.5 };
        let m = weighted_moments(&d, &Generator::ln(), None).unwrap();
        let c = bajraktarevic_clt_params(&Generator::ln(), &m).unwrap();
        assert!((c.limit - 1.0).abs() < 1e-9);
        assert!((c.asym_variance().unwrap() - 0.25).abs() < 1e-9);
    }

    #[test]
    fn lognormal_weighted_by_x() {
        // Oracle: high-precision quadrature of the same moment integrals.
        let d = DistributionSpec::LogNormalBase { mu: 0.0, sigma: 0.5 };
        let m = weighted_moments(&d, &Generator::ln(), Some(&WeightFunction::power(1.0))).unwrap();
        let c = bajraktarevic_clt_params(&Generator::ln(), &m).unwrap();
        assert!((c.limit - 1.284_025_416_687_741).abs() < 1e-9);
        assert!((c.asym_variance().unwrap() - 0.661_562_505_191_460_8).abs() < 1e-8);
    }

    #[test]
    fn geometric_examples() {
        let c = geometric_clt_params(&logs(0.0, 1.0)).unwrap();
        assert_eq!((c.limit, c.asym_variance()), (1.0, Some(1.0)));
        let c = geometric_clt_params(&logs(1.0, 1.0)).unwrap();
        assert_eq!(c.limit, E);
        assert_relative_eq!(c.asym_variance().unwrap(), E * E, max_relative = 1e-15);
        assert_eq!(geometric_clt_params(&logs(1.0, 0.0)), Err(TheoryError::DegenerateVariance));
    }

    #[test]
    fn cauchy_quotients_share_geometric_params() {
        let m = logs(0.3, 0.8);
        let g = geometric_clt_params(&m).unwrap();
        assert_eq!(exp_cauchy_clt_params(&m).unwrap(), g);
        assert_eq!(log_cauchy_clt_params(&m).unwrap(), g);
        let no_mean = MomentSet { mean_xi: None, ..m };
        assert_eq!(exp_cauchy_clt_params(&no_mean), Err(TheoryError::MissingMoment("mean_xi")));
    }

    #[test]
    fn point_mass_log_cauchy_is_degenerate() {
        let m = analytic_moments(&DistributionSpec::PointMass { c: 3.0 }).unwrap();
        let c = log_cauchy_clt_params(&m).unwrap();
        assert_eq!(c.spread, Spread::Degenerate);
        assert!((c.limit - 3.0).abs() < 1e-15);
    }

    #[test]
    fn explog_moments() {
        let m = analytic_moments(&DistributionSpec::ExpLog { lambda: 1.0 }).unwrap();
        assert_eq!(m.mean_logs, Some(1.0));
        assert_eq!(m.var_logs, Some(1.0));
        assert_eq!(m.mean_xi, None);
        assert!((m.mean_loglog.unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-15);
        let m2 = analytic_moments(&DistributionSpec::ExpLog { lambda: 2.0 }).unwrap();
        assert_eq!(m2.mean_xi, Some(2.0));
        assert!(m.quadrature_fields.is_empty());
    }

    #[test]
    fn explog_closed_forms_match_quadrature() {
        for lambda in [0.5, 1.0, 2.0, 3.5] {
            let d = DistributionSpec::ExpLog { lambda };
            let m = analytic_moments(&d).unwrap();
            let ll = |x: f64| y_ln_y(x.ln());
            let qm = d.expectation(ll, 1e-11).unwrap();
            let qv = d.expectation(|x| (ll(x) - qm).powi(2), 1e-11).unwrap();
            assert!((m.mean_loglog.unwrap() - qm).abs() < 1e-9, "λ = {lambda}");
            assert!((m.var_loglog.unwrap() - qv).abs() < 1e-8, "λ = {lambda}");
        }
    }

    #[test]
    fn mult_constant_examples() {
        let m = analytic_moments(&DistributionSpec::ExpLog { lambda: 1.0 }).unwrap();
        // e(γ − 1)
        assert!((mult_cauchy_limit_constant(&m).unwrap() - (-1.149_246_975_455_303)).abs() < 1e-12);
        let z = MomentSet { mean_logs: Some(1.0), mean_loglog: Some(0.0), ..Default::default() };
        assert_eq!(mult_cauchy_limit_constant(&z).unwrap(), 0.0);
        let pm = analytic_moments(&DistributionSpec::PointMass { c: E }).unwrap();
        assert_eq!(mult_cauchy_limit_constant(&pm).unwrap(), 0.0);
        let bad = MomentSet { mean_logs: Some(-0.5), mean_loglog: Some(0.0), ..Default::default() };
        assert!(mult_cauchy_limit_constant(&bad).is_err());
    }

    #[test]
    fn mult_clt_examples() {
        let m = analytic_moments(&DistributionSpec::ExpLog { lambda: 1.0 }).unwrap();
        let c = mult_cauchy_clt_params(&m).unwrap();
        assert_eq!(c.limit, 1.0);
        assert_eq!(c.asym_variance(), Some(1.0));
        let n = 1000;
        assert!((c.centering_at(n) - (1.0 + (EULER_GAMMA - 1.0) / (n as f64).ln())).abs() < 1e-15);
        let pm = analytic_moments(&DistributionSpec::PointMass { c: E }).unwrap();
        assert_eq!(mult_cauchy_clt_params(&pm), Err(TheoryError::DegenerateVariance));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_method(0.0, 1.0, &ExpMap).unwrap(), (1.0, 1.0));
        let (r, v) = ratio_delta_method(2.0, 4.0, 0.5, 0.3, 0.0).unwrap();
        assert_eq!(r, 0.5);
        assert_relative_eq!(v, 0.5 / 16.0 + 0.3 * 4.0 / 256.0, max_relative = 1e-15);
    }

    #[test]
    fn lomax_divergences_are_unavailable() {
        let m = analytic_moments(&DistributionSpec::ExpNegLomax { alpha: 0.8 }).unwrap();
        assert_eq!(m.mean_logs, None);
        assert_eq!(m.var_logs, None);
        assert!(m.mean_xi.unwrap() > 0.0 && m.mean_xi.unwrap() < 1.0);
        let m = analytic_moments(&DistributionSpec::ExpNegLomax { alpha: 1.5 }).unwrap();
        assert_eq!(m.mean_logs, Some(-2.0));
        assert_eq!(m.var_logs, None);
        let m = analytic_moments(&DistributionSpec::ExpLomax { alpha: 3.0 }).unwrap();
        assert_eq!(m.mean_xi, None);
        assert_eq!(m.mean_logs, Some(0.5));
        assert!(matches!(exp_cauchy_clt_params(&m), Err(TheoryError::MissingMoment("mean_xi"))));
    }

    #[test]
    fn validation() {
        let ok = MomentSet { var_pf: Some(1.0), var_p: Some(1.0), cov_pf_p: Some(1.0), ..Default::default() };
        assert!(ok.validate().is_ok());
        let bad = MomentSet { cov_pf_p: Some(1.1), ..ok.clone() };
        assert!(bad.validate().is_err());
        let neg = MomentSet { var_logs: Some(-1e-3), ..Default::default() };
        assert!(neg.validate().is_err());
    }
}
