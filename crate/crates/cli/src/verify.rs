//! The `verify` subcommand: experiment spec files and the built-in suites.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use genmeans::asymptotics::MomentSet;
use genmeans::fmt::{g17, to_json_pretty};
use genmeans::montecarlo::{
    run, theory_with, write_replicates_csv, Check, ExperimentReport, ExperimentSpec, Mode, Tolerances,
};
use genmeans::structure::{
    falsify_bisymmetry_g, reproduce_counterexample_l, sweep_chain, sweep_entropy, sweep_mean_axioms,
    sweep_qa_bisymmetry, CounterexampleL, GWitness, SweepResult,
};
use genmeans::{DistributionSpec, MeanKindSpec};
use serde::{Deserialize, Serialize};

pub const SPEC_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 0xB41A;

/// Top level of a spec file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    pub schema_version: u32,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub experiments: Vec<ExperimentEntry>,
    #[serde(default)]
    pub suites: Vec<SuiteEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentEntry {
    pub name: String,
    pub kind: MeanKindSpec,
    pub distribution: DistributionSpec,
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub mode: Mode,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Moments that replace the computed ones.
    #[serde(default)]
    pub moments: MomentSet,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "suite", rename_all = "snake_case", deny_unknown_fields)]
pub enum SuiteEntry {
    Bisym {
        #[serde(default = "default_l_n")]
        l_n: Vec<u32>,
        #[serde(default = "default_g_grid")]
        g_grid: Vec<f64>,
    },
    Structure {
        #[serde(default = "default_trials")]
        trials: usize,
    },
}

fn default_l_n() -> Vec<u32> {
    (2..=8).collect()
}

fn default_g_grid() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 4.0]
}

fn default_trials() -> usize {
    10_000
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    Bisym,
    Structure,
}

impl SuiteName {
    fn entry(self) -> SuiteEntry {
        match self {
            SuiteName::Bisym => SuiteEntry::Bisym { l_n: default_l_n(), g_grid: default_g_grid() },
            SuiteName::Structure => SuiteEntry::Structure { trials: default_trials() },
        }
    }
}

impl VerifySpec {
    pub fn from_suite(s: SuiteName) -> Self {
        VerifySpec {
            schema_version: SPEC_SCHEMA_VERSION,
            seed: None,
            tolerances: BTreeMap::new(),
            experiments: Vec::new(),
            suites: vec![s.entry()],
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let spec: VerifySpec =
            serde_json::from_str(&text).with_context(|| format!("parsing spec {}", path.display()))?;
        if spec.schema_version != SPEC_SCHEMA_VERSION {
            bail!("unsupported schema_version {} (expected {SPEC_SCHEMA_VERSION})", spec.schema_version);
        }
        if spec.experiments.is_empty() && spec.suites.is_empty() {
            bail!("spec lists neither experiments nor suites");
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BisymReport {
    pub schema_version: u32,
    pub suite: &'static str,
    pub counterexamples: Vec<CounterexampleL>,
    pub g_grid: Vec<f64>,
    pub g_witness: Option<GWitness>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub wall_clock_secs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub schema_version: u32,
    pub suite: &'static str,
    pub seed: u64,
    pub sweeps: Vec<SweepResult>,
    pub pass: bool,
    pub wall_clock_secs: f64,
}

/// Options that apply to every run of a spec.
pub struct RunOptions<'a> {
    pub seed: Option<u64>,
    pub tolerance_overrides: &'a [(String, f64)],
    pub out: &'a Path,
}

fn apply(tol: &mut Tolerances, overrides: impl IntoIterator<Item = (String, f64)>) -> Result<()> {
    for (k, v) in overrides {
        tol.set(&k, v).map_err(|e| anyhow!(e))?;
    }
    Ok(())
}

fn file_stem(name: &str) -> Result<&str> {
    let ok = !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c));
    if !ok || name.starts_with('.') {
        bail!("experiment name `{name}` must be non-empty and use only letters, digits, `-`, `_` and `.`");
    }
    Ok(name)
}

/// Validates every experiment before anything runs, so a bad spec fails
/// without partial output.
fn prepare(spec: &VerifySpec, opts: &RunOptions) -> Result<Vec<ExperimentSpec>> {
    let mut seen = HashSet::new();
    spec.experiments
        .iter()
        .map(|e| {
            let stem = file_stem(&e.name)?;
            if !seen.insert(stem.to_string()) || ["bisym", "structure"].contains(&stem) {
                bail!("experiment name `{stem}` is duplicated or reserved");
            }
            let mut tol = Tolerances::default();
            apply(&mut tol, spec.tolerances.clone())?;
            apply(&mut tol, e.tolerances.clone())?;
            apply(&mut tol, opts.tolerance_overrides.iter().cloned())?;
            let kind = e.kind.build().map_err(|m| anyhow!("{}: {m}", e.name))?;
            e.distribution.validate().map_err(|m| anyhow!("{}: {m}", e.name))?;
            let (theory, moments) = theory_with(&kind, &e.distribution, e.mode, &e.moments)
                .with_context(|| format!("{}: theory parameters", e.name))?;
            let x = ExperimentSpec {
                name: e.name.clone(),
                kind: e.kind.clone(),
                dist: e.distribution,
                n_grid: e.n_grid.clone(),
                replicates: e.replicates,
                seed: opts.seed.or(e.seed).or(spec.seed).unwrap_or(DEFAULT_SEED),
                mode: e.mode,
                theory,
                moments,
                tolerances: tol,
            };
            x.validate().with_context(|| format!("experiment `{}`", e.name))?;
            Ok(x)
        })
        .collect()
}

fn write_report<T: Serialize>(out: &Path, stem: &str, report: &T) -> Result<()> {
    let path = out.join(format!("{stem}.json"));
    fs::write(&path, to_json_pretty(report)?).with_context(|| format!("writing {}", path.display()))
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        println!("    {:<6} {:<20} {:>24}  {}", if c.pass { "ok" } else { "FAIL" }, c.name, g17(c.value), c.bound);
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run_experiment(x: &ExperimentSpec, out: &Path) -> Result<ExperimentReport> {
    let report = run(x).with_context(|| format!("running `{}`", x.name))?;
    write_report(out, &x.name, &report)?;
    let csv_path = out.join(format!("{}.replicates.csv", x.name));
    let file = fs::File::create(&csv_path).with_context(|| format!("writing {}", csv_path.display()))?;
    write_replicates_csv(&report.replicate_rows, std::io::BufWriter::new(file))?;
    Ok(report)
}

fn bisym_suite(l_n: &[u32], g_grid: &[f64]) -> Result<BisymReport> {
    let start = Instant::now();
    let mut checks = Vec::new();
    let mut counterexamples = Vec::new();
    for &n in l_n {
        let c = reproduce_counterexample_l(n).with_context(|| format!("counterexample for n = {n}"))?;
        match (c.lhs, c.rhs, c.convexity_margin) {
            (Some(lhs), Some(rhs), _) => {
                checks.push(Check {
                    name: format!("l{n}_lhs_below_2800"),
                    value: lhs,
                    bound: "< 2800".into(),
                    pass: lhs < 2800.0,
                });
                checks.push(Check {
                    name: format!("l{n}_rhs_above_2800"),
                    value: rhs,
                    bound: "> 2800".into(),
                    pass: rhs > 2800.0,
                });
            }
            (_, _, Some(m)) => {
                checks.push(Check {
                    name: format!("l{n}_convexity_margin"),
                    value: m,
                    bound: "> 0".into(),
                    pass: m > 0.0,
                });
            }
            _ => bail!("counterexample for n = {n} produced no verdict"),
        }
        counterexamples.push(c);
    }
    let g_witness = if g_grid.is_empty() {
        None
    } else {
        let w = falsify_bisymmetry_g(g_grid);
        let gap = w.as_ref().map(|w| w.refined_gap).unwrap_or(0.0);
        checks.push(Check { name: "g_gap".into(), value: gap, bound: "|.| > 1e-6".into(), pass: gap.abs() > 1e-6 });
        w.ok()
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(BisymReport {
        schema_version: SPEC_SCHEMA_VERSION,
        suite: "bisym",
        counterexamples,
        g_grid: g_grid.to_vec(),
        g_witness,
        checks,
        pass,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

fn structure_suite(trials: usize, seed: u64) -> Result<StructureReport> {
    if trials == 0 {
        bail!("structure suite needs at least one trial");
    }
    let start = Instant::now();
    let sweeps = vec![
        sweep_mean_axioms(trials, seed),
        sweep_chain(trials, seed.wrapping_add(1)),
        sweep_entropy(trials, seed.wrapping_add(2)),
        sweep_qa_bisymmetry(trials, seed.wrapping_add(3)),
    ];
    let pass = sweeps.iter().all(SweepResult::pass);
    Ok(StructureReport {
        schema_version: SPEC_SCHEMA_VERSION,
        suite: "structure",
        seed,
        sweeps,
        pass,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

/// Runs everything in `spec`, writing reports under `opts.out`. Returns
/// whether every check passed.
pub fn verify(spec: &VerifySpec, opts: &RunOptions) -> Result<bool> {
    let experiments = prepare(spec, opts)?;
    fs::create_dir_all(opts.out).with_context(|| format!("creating {}", opts.out.display()))?;
    let mut all = true;
    for x in &experiments {
        let r = run_experiment(x, opts.out)?;
        println!("{} {} [{:?}, {}, seed {}]", verdict(r.pass), r.name, r.mode, r.mean_label, r.seed);
        print_checks(&r.checks);
        all &= r.pass;
    }
    for s in &spec.suites {
        match s {
            SuiteEntry::Bisym { l_n, g_grid } => {
                let r = bisym_suite(l_n, g_grid)?;
                write_report(opts.out, "bisym", &r)?;
                println!("{} bisym", verdict(r.pass));
                for c in &r.counterexamples {
                    if let (Some(lhs), Some(rhs)) = (c.lhs, c.rhs) {
                        println!("    n = {}: LHS = {}, RHS = {}", c.n, g17(lhs), g17(rhs));
                    }
                }
                print_checks(&r.checks);
                all &= r.pass;
            }
            SuiteEntry::Structure { trials } => {
                let seed = opts.seed.or(spec.seed).unwrap_or(DEFAULT_SEED);
                let r = structure_suite(*trials, seed)?;
                write_report(opts.out, "structure", &r)?;
                println!("{} structure [{} trials per sweep, seed {}]", verdict(r.pass), trials, seed);
                for w in &r.sweeps {
                    let first = w.first_violation.as_deref().unwrap_or("");
                    println!(
                        "    {:<6} {:<16} {} violations {first}",
                        if w.pass() { "ok" } else { "FAIL" },
                        w.name,
                        w.violations
                    );
                }
                all &= r.pass;
            }
        }
    }
    Ok(all)
}
