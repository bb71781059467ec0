use anyhow::{anyhow, Result};
use clap::{Args, ValueEnum};
use genmeans::montecarlo::Mode;
use genmeans::{GeneratorSpec, MeanKindSpec, WeightSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindName {
    #[value(alias = "qa")]
    QuasiArithmetic,
    Bajraktarevic,
    Gini,
    Holder,
    ExpCauchy,
    LogCauchy,
    MultCauchy,
}

/// Flags selecting a mean.
#[derive(Debug, Clone, Args)]
pub struct KindArgs {
    /// Mean family.
    #[arg(long, value_enum)]
    pub kind: Option<KindName>,
    /// Generator for quasi-arithmetic and Bajraktarević means:
    /// identity, ln, exp, reciprocal, power:P.
    #[arg(long)]
    pub generator: Option<String>,
    /// Weight for Bajraktarević means: one, power:Q.
    #[arg(long)]
    pub weight: Option<String>,
    /// Gini exponent r.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Gini exponent s.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Hölder exponent.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
}

impl KindArgs {
    /// The selected mean; `default` stands in when `--kind` is absent.
    pub fn spec(&self, default: Option<MeanKindSpec>) -> Result<MeanKindSpec> {
        let generator = || -> Result<GeneratorSpec> {
            let g = self.generator.as_deref().ok_or_else(|| anyhow!("this mean needs --generator"))?;
            GeneratorSpec::parse(g).map_err(|e| anyhow!(e))
        };
        let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| anyhow!("this mean needs --{flag}"));
        let spec = match self.kind {
            None => return default.ok_or_else(|| anyhow!("--kind is required")),
            Some(KindName::QuasiArithmetic) => MeanKindSpec::QuasiArithmetic { generator: generator()? },
            Some(KindName::Bajraktarevic) => {
                let w = self.weight.as_deref().ok_or_else(|| anyhow!("a Bajraktarević mean needs --weight"))?;
                MeanKindSpec::Bajraktarevic {
                    generator: generator()?,
                    weight: WeightSpec::parse(w).map_err(|e| anyhow!(e))?,
                }
            }
            Some(KindName::Gini) => MeanKindSpec::Gini { r: need(self.r, "r")?, s: need(self.s, "s")? },
            Some(KindName::Holder) => MeanKindSpec::Holder { p: need(self.p, "p")? },
            Some(KindName::ExpCauchy) => MeanKindSpec::ExpCauchy,
            Some(KindName::LogCauchy) => MeanKindSpec::LogCauchy,
            Some(KindName::MultCauchy) => MeanKindSpec::MultCauchy,
        };
        spec.build().map_err(|e| anyhow!(e))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeName {
    Slln,
    Clt,
    MultConstant,
    MultClt,
}

impl From<ModeName> for Mode {
    fn from(m: ModeName) -> Mode {
        match m {
            ModeName::Slln => Mode::Slln,
            ModeName::Clt => Mode::Clt,
            ModeName::MultConstant => Mode::MultConstant,
            ModeName::MultClt => Mode::MultClt,
        }
    }
}
