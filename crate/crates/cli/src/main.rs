mod kind;
mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use genmeans::apportionment::{
    apportion, audit_json, write_allocation_csv, ApportionMode, ApportionmentConfig, Census,
};
use genmeans::asymptotics::MomentSet;
use genmeans::fmt::{g17, to_json_pretty};
use genmeans::montecarlo::{theory_with, Mode};
use genmeans::{evaluate_mean, DistributionSpec, GeneratorSpec, MeanKindSpec, Sample};
use serde::Serialize;

use kind::{KindArgs, ModeName};
use verify::{RunOptions, SuiteName, VerifySpec};

/// Generalized means: evaluation, limit theory, simulation checks and
/// divisor-method apportionment.
#[derive(Debug, Parser)]
#[command(name = "genmeans", version)]
struct Cli {
    /// Master seed; overrides any seed in a spec file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for reports.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Tolerance overrides, `name=value[,name=value...]`.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_tolerance)]
    tolerance: Vec<(String, f64)>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a mean of the given numbers.
    Mean {
        #[command(flatten)]
        kind: KindArgs,
        /// Read values from a file, one per line.
        #[arg(long, conflicts_with = "values")]
        file: Option<PathBuf>,
        #[arg(allow_negative_numbers = true)]
        values: Vec<f64>,
    },
    /// Print the limit and asymptotic variance for a mean under a law.
    Theory {
        #[command(flatten)]
        kind: KindArgs,
        /// Law of the sample, e.g. `explog:2`, `lognormal:0,0.5`, `uniform:1,3`.
        #[arg(long)]
        dist: String,
        #[arg(long, value_enum, default_value = "clt")]
        mode: ModeName,
        /// Also report centering and scale at this sample size.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run the experiments and suites of a spec file, or one built-in suite.
    Verify {
        #[arg(required_unless_present = "suite", conflicts_with = "suite")]
        spec: Option<PathBuf>,
        #[arg(long, value_enum)]
        suite: Option<SuiteName>,
    },
    /// Apportion a house among states.
    Apportion {
        /// CSV with `name,population` columns.
        #[arg(long)]
        census: PathBuf,
        #[arg(long, default_value_t = genmeans::apportionment::DEFAULT_HOUSE_SIZE)]
        house: u64,
        #[arg(long, value_enum, default_value = "one-shot")]
        mode: ModeArg,
        #[command(flatten)]
        kind: KindArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    OneShot,
    Iterative,
}

fn parse_tolerance(pair: &str) -> Result<(String, f64), String> {
    let (k, v) = pair.split_once('=').ok_or_else(|| format!("expected name=value, got `{pair}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("bad number in `{pair}`"))?;
    Ok((k.trim().to_string(), v))
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Pass,
    Fail,
}

fn read_values(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| l.trim().parse::<f64>().with_context(|| format!("{}:{}: not a number", path.display(), i + 1)))
        .collect()
}

fn cmd_mean(kind: &KindArgs, file: Option<&Path>, values: Vec<f64>) -> Result<Outcome> {
    let spec = kind.spec(None)?;
    let built = spec.build().map_err(|e| anyhow!(e))?;
    let values = match file {
        Some(p) => read_values(p)?,
        None => values,
    };
    if values.is_empty() {
        bail!("no values given");
    }
    // A value outside the mean's domain is a failed evaluation, not a usage error.
    let sample = match Sample::new(values, built.required_domain()) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("FAIL: {e}");
            return Ok(Outcome::Fail);
        }
    };
    match evaluate_mean(&built, &sample) {
        Ok(m) => {
            println!("{}", g17(m));
            Ok(Outcome::Pass)
        }
        Err(e) => {
            eprintln!("FAIL: {e}");
            Ok(Outcome::Fail)
        }
    }
}

#[derive(Serialize)]
struct TheoryOut {
    mean_kind: MeanKindSpec,
    mean_label: String,
    distribution: DistributionSpec,
    mode: Mode,
    params: genmeans::asymptotics::CltParams,
    asymptotic_variance: Option<f64>,
    limit_constant: Option<f64>,
    moments: MomentSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    at_n: Option<AtN>,
}

#[derive(Serialize)]
struct AtN {
    n: usize,
    centering: f64,
    scale: f64,
}

fn cmd_theory(kind: &KindArgs, dist: &str, mode: ModeName, n: Option<usize>) -> Result<Outcome> {
    let spec = kind.spec(None)?;
    let built = spec.build().map_err(|e| anyhow!(e))?;
    let dist = DistributionSpec::parse(dist).map_err(|e| anyhow!(e))?;
    dist.validate().map_err(|e| anyhow!(e))?;
    let mode = Mode::from(mode);
    let (params, moments) = theory_with(&built, &dist, mode, &MomentSet::default())?;
    let out = TheoryOut {
        mean_label: built.label(),
        mean_kind: spec,
        distribution: dist,
        mode,
        asymptotic_variance: params.asym_variance(),
        limit_constant: params.limit_constant(),
        params,
        moments,
        at_n: n.map(|n| AtN { n, centering: params.centering_at(n), scale: params.scale(n) }),
    };
    println!("{}", to_json_pretty(&out)?);
    Ok(Outcome::Pass)
}

fn cmd_verify(cli: &Cli, spec: Option<&Path>, suite: Option<SuiteName>) -> Result<Outcome> {
    let spec = match (spec, suite) {
        (Some(p), _) => VerifySpec::from_file(p)?,
        (None, Some(s)) => VerifySpec::from_suite(s),
        (None, None) => bail!("give a spec file or --suite"),
    };
    let mut check = genmeans::montecarlo::Tolerances::default();
    for (k, v) in &cli.tolerance {
        check.set(k, *v).map_err(|e| anyhow!(e))?;
    }
    let opts = RunOptions { seed: cli.seed, tolerance_overrides: &cli.tolerance, out: &cli.out };
    Ok(if verify::verify(&spec, &opts)? { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_apportion(cli: &Cli, census: &Path, house: u64, mode: ModeArg, kind: &KindArgs) -> Result<Outcome> {
    let default = MeanKindSpec::QuasiArithmetic { generator: GeneratorSpec::Ln };
    let method = kind.spec(Some(default))?.build().map_err(|e| anyhow!(e))?;
    let mode = match mode {
        ModeArg::OneShot => ApportionMode::OneShot,
        ModeArg::Iterative => ApportionMode::Iterative,
    };
    let file = fs::File::open(census).with_context(|| format!("opening {}", census.display()))?;
    let census = Census::from_csv(file).with_context(|| format!("reading census {}", census.display()))?;
    let config = ApportionmentConfig::new(house, method, mode)?;
    let alloc = apportion(&census, &config)?;
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let csv_path = cli.out.join("allocation.csv");
    write_allocation_csv(&alloc, fs::File::create(&csv_path).with_context(|| csv_path.display().to_string())?)?;
    fs::write(cli.out.join("audit.json"), audit_json(&alloc)).context("writing audit.json")?;
    println!("{} ({:?}, house {}, {} seats after the initial allocation)", alloc.method, mode, house, alloc.remaining);
    println!("{:<24} {:>14} {:>6} {:>6}", "state", "population", "floor", "seats");
    for (row, floor) in alloc.states.iter().zip(&alloc.initial_seats) {
        println!("{:<24} {:>14} {:>6} {:>6}", row.name, row.population, floor, row.seats);
    }
    Ok(Outcome::Pass)
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::Mean { kind, file, values } => cmd_mean(kind, file.as_deref(), values.clone()),
        Command::Theory { kind, dist, mode, n } => cmd_theory(kind, dist, *mode, *n),
        Command::Verify { spec, suite } => cmd_verify(cli, spec.as_deref(), *suite),
        Command::Apportion { census, house, mode, kind } => cmd_apportion(cli, census, *house, *mode, kind),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
