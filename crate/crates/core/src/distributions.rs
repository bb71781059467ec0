//! Parametric laws for the i.i.d. observations, with sampling through the
//! counter-based generator and expectations through quadrature over each
//! family's base variable.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{MeanError, QuadratureError};
use crate::quadrature::{integrate, integrate_half_line, integrate_real_line};
use crate::rng::CounterRng;
use crate::sample::{Domain, Sample};

const MAX_REDRAWS: usize = 1000;

/// Law of ξ.
///
/// The two Lomax-driven families exist to represent laws whose moments
/// diverge: `ExpNegLomax` is `ξ = e^{−η}` and `ExpLomax` is `ξ = e^{η}` with
/// `P(η > t) = (1 + t)^{−α}`, so `E ηᵏ < ∞` exactly when `k < α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DistributionSpec {
    /// `ξ = e^η`, `η ~ Exp(λ)`.
    ExpLog {
        lambda: f64,
    },
    /// `ln ξ ~ N(μ, σ²)`.
    LogNormalBase {
        mu: f64,
        sigma: f64,
    },
    /// `ξ = 1 + e^{μ + σZ}`.
    ShiftedLogNormal {
        mu: f64,
        sigma: f64,
    },
    UniformInterval {
        a: f64,
        b: f64,
    },
    PointMass {
        c: f64,
    },
    ExpNegLomax {
        alpha: f64,
    },
    ExpLomax {
        alpha: f64,
    },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<(), String> {
        let ok = match *self {
            DistributionSpec::ExpLog { lambda } => lambda > 0.0 && lambda.is_finite(),
            DistributionSpec::LogNormalBase { mu, sigma } | DistributionSpec::ShiftedLogNormal { mu, sigma } => {
                mu.is_finite() && sigma > 0.0 && sigma.is_finite()
            }
            DistributionSpec::UniformInterval { a, b } => a > 0.0 && a < b && b.is_finite(),
            DistributionSpec::PointMass { c } => c > 0.0 && c.is_finite(),
            DistributionSpec::ExpNegLomax { alpha } | DistributionSpec::ExpLomax { alpha } => {
                alpha > 0.0 && alpha.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(format!("invalid distribution parameters: {self:?}"))
        }
    }

    /// Support tag: `GreaterThanOne` whenever the law lives on `(1, ∞)`.
    pub fn support(&self) -> Domain {
        match *self {
            DistributionSpec::ExpLog { .. }
            | DistributionSpec::ShiftedLogNormal { .. }
            | DistributionSpec::ExpLomax { .. } => Domain::GreaterThanOne,
            DistributionSpec::UniformInterval { a, .. } if a >= 1.0 => Domain::GreaterThanOne,
            DistributionSpec::PointMass { c } if c > 1.0 => Domain::GreaterThanOne,
            _ => Domain::Positive,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            DistributionSpec::ExpLog { lambda } => format!("exp_log({lambda})"),
            DistributionSpec::LogNormalBase { mu, sigma } => format!("lognormal({mu}, {sigma})"),
            DistributionSpec::ShiftedLogNormal { mu, sigma } => format!("shifted_lognormal({mu}, {sigma})"),
            DistributionSpec::UniformInterval { a, b } => format!("uniform({a}, {b})"),
            DistributionSpec::PointMass { c } => format!("point_mass({c})"),
            DistributionSpec::ExpNegLomax { alpha } => format!("exp_neg_lomax({alpha})"),
            DistributionSpec::ExpLomax { alpha } => format!("exp_lomax({alpha})"),
        }
    }

    fn draw_raw(&self, rng: &mut CounterRng) -> f64 {
        match *self {
            DistributionSpec::ExpLog { lambda } => (-rng.open01().ln() / lambda).exp(),
            DistributionSpec::LogNormalBase { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                (mu + sigma * z).exp()
            }
            DistributionSpec::ShiftedLogNormal { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                1.0 + (mu + sigma * z).exp()
            }
            DistributionSpec::UniformInterval { a, b } => a + (b - a) * rng.open01(),
            DistributionSpec::PointMass { c } => c,
            DistributionSpec::ExpNegLomax { alpha } => (-lomax(rng, alpha)).exp(),
            DistributionSpec::ExpLomax { alpha } => lomax(rng, alpha).exp(),
        }
    }

    /// One draw strictly inside the support; boundary hits produced by
    /// rounding are redrawn.
    pub fn draw(&self, rng: &mut CounterRng) -> Option<f64> {
        let support = self.support();
        (0..MAX_REDRAWS).map(|_| self.draw_raw(rng)).find(|&x| support.contains(x) && x.is_finite())
    }

    /// `n` draws from stream `stream` of `seed`.
    pub fn sample(&self, n: usize, seed: u64, stream: u64) -> Result<Sample, MeanError> {
        let mut rng = CounterRng::new(seed, stream);
        let values = (0..n)
            .map(|_| {
                self.draw(&mut rng).ok_or(MeanError::Parameter(format!("{} kept hitting its boundary", self.label())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Sample::new(values, self.support())
    }

    /// `E h(ξ)` by quadrature over the family's base variable.
    pub fn expectation<H: Fn(f64) -> f64>(&self, h: H, tol: f64) -> Result<f64, QuadratureError> {
        match *self {
            DistributionSpec::ExpLog { lambda } => integrate_half_line(
                |t| {
                    let w = lambda * (-lambda * t).exp();
                    weighted(&h, t.exp(), w)
                },
                tol,
            ),
            DistributionSpec::LogNormalBase { mu, sigma } => integrate_real_line(
                |z| {
                    let w = normal_density(z);
                    weighted(&h, (mu + sigma * z).exp(), w)
                },
                tol,
            ),
            DistributionSpec::ShiftedLogNormal { mu, sigma } => integrate_real_line(
                |z| {
                    let w = normal_density(z);
                    weighted(&h, 1.0 + (mu + sigma * z).exp(), w)
                },
                tol,
            ),
            DistributionSpec::UniformInterval { a, b } => integrate(|x| h(x) / (b - a), a, b, tol),
            DistributionSpec::PointMass { c } => {
                return Ok(h(c));
            }
            DistributionSpec::ExpNegLomax { alpha } => integrate_half_line(
                |t| {
                    let w = alpha * (1.0 + t).powf(-alpha - 1.0);
                    if w == 0.0 {
                        0.0
                    } else {
                        h((-t).exp()) * w
                    }
                },
                tol,
            ),
            DistributionSpec::ExpLomax { alpha } => integrate_half_line(
                |t| {
                    let w = alpha * (1.0 + t).powf(-alpha - 1.0);
                    if w == 0.0 {
                        0.0
                    } else {
                        h(t.exp()) * w
                    }
                },
                tol,
            ),
        }
        .map(|q| q.value)
    }

    /// Parses the CLI form `family:p1,p2`, e.g. `explog:2`, `lognormal:0,0.5`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let (head, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.is_empty() {
            vec![]
        } else {
            args.split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| format!("bad number `{a}`")))
                .collect::<Result<_, _>>()?
        };
        let d = match (head, nums.as_slice()) {
            ("explog" | "exp_log", [lambda]) => DistributionSpec::ExpLog { lambda: *lambda },
            ("lognormal", [mu, sigma]) => DistributionSpec::LogNormalBase { mu: *mu, sigma: *sigma },
            ("shifted-lognormal" | "shifted_lognormal", [mu, sigma]) => {
                DistributionSpec::ShiftedLogNormal { mu: *mu, sigma: *sigma }
            }
            ("uniform", [a, b]) => DistributionSpec::UniformInterval { a: *a, b: *b },
            ("point" | "point_mass", [c]) => DistributionSpec::PointMass { c: *c },
            ("exp-neg-lomax" | "exp_neg_lomax", [alpha]) => DistributionSpec::ExpNegLomax { alpha: *alpha },
            ("exp-lomax" | "exp_lomax", [alpha]) => DistributionSpec::ExpLomax { alpha: *alpha },
            _ => return Err(format!("unknown distribution `{s}`")),
        };
        d.validate()?;
        Ok(d)
    }
}

fn lomax(rng: &mut CounterRng, alpha: f64) -> f64 {
    rng.open01().powf(-1.0 / alpha) - 1.0
}

/// `h(x)·w`, dropping points of zero density and points whose value
/// overflowed. Only used for light-tailed base variables, where the mass past
/// the overflow point is below rounding.
fn weighted<H: Fn(f64) -> f64>(h: &H, x: f64, w: f64) -> f64 {
    if w == 0.0 || !x.is_finite() {
        0.0
    } else {
        h(x) * w
    }
}

fn normal_density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
