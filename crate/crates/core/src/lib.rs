//! Generalized means (quasi-arithmetic, Bajraktarević, Gini, Hölder and the
//! Cauchy quotient means), the parameters of their limit theorems, Monte
//! Carlo verification of those theorems, structural checks and mean-based
//! seat apportionment.

pub mod apportionment;
pub mod asymptotics;
pub mod distributions;
pub mod error;
pub mod fmt;
pub mod generator;
pub mod means;
pub mod montecarlo;
pub mod numeric;
pub mod quadrature;
pub mod rng;
pub mod sample;
pub mod stats;
pub mod structure;

pub use distributions::DistributionSpec;
pub use error::{ApportionError, ExperimentError, MeanError, QuadratureError, StructureError, TheoryError};
pub use generator::{Direction, Generator, GeneratorSpec, WeightFunction, WeightSpec};
pub use means::{
    bajraktarevic_mean, evaluate_mean, exp_cauchy_mean, gini_mean, holder_mean, log_cauchy_mean, mean2,
    mult_cauchy_mean, quasi_arithmetic_mean, MeanKind, MeanKindSpec,
};
pub use sample::{Domain, Interval, Sample};
