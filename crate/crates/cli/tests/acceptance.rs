//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Criteria that exercise the command line run the built binary on
//! the bundled specs; the rest call the library directly.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use genmeans::apportionment::{
    apportion, initial_allocation, ApportionMode, ApportionmentConfig, Census, StateRecord, DEFAULT_HOUSE_SIZE,
};
use genmeans::asymptotics::{
    bajraktarevic_clt_params, delta_method, exp_cauchy_clt_params, geometric_clt_params, log_cauchy_clt_params,
    quasi_arithmetic_clt_params, ExpMap, MomentSet,
};
use genmeans::means::MeanKind;
use genmeans::rng::CounterRng;
use genmeans::structure::{falsify_bisymmetry_g, sweep_chain, sweep_entropy, sweep_mean_axioms, sweep_qa_bisymmetry};
use genmeans::Generator;
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

/// Runs the binary with `args` writing into `out`; returns the exit code,
/// stdout and elapsed seconds.
fn cli(out: &Path, args: &[&str]) -> Result<(i32, String, f64), String> {
    let start = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_genmeans"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .map_err(|e| format!("spawning genmeans: {e}"))?;
    let secs = start.elapsed().as_secs_f64();
    if !o.stderr.is_empty() {
        eprint!("{}", String::from_utf8_lossy(&o.stderr));
    }
    Ok((o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stdout).into_owned(), secs))
}

fn read_json(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn num(v: &Value, ptr: &str) -> Result<f64, String> {
    v.pointer(ptr).and_then(Value::as_f64).ok_or_else(|| format!("missing number at {ptr}"))
}

fn tempdir() -> Result<tempfile::TempDir, String> {
    tempfile::tempdir().map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bisym_reproduction() -> Outcome {
    let dir = tempdir()?;
    let (code, _, secs) = cli(dir.path(), &["verify", "--suite", "bisym"])?;
    ensure(code == 0, || format!("exit code {code}"))?;
    let r = read_json(&dir.path().join("bisym.json"))?;
    let cases = r["counterexamples"].as_array().ok_or("no counterexamples")?;
    let two = cases.iter().find(|c| c["n"] == 2).ok_or("n = 2 missing")?;
    let (lhs, rhs) = (num(two, "/lhs")?, num(two, "/rhs")?);
    ensure(lhs > 2797.4 && lhs < 2798.4, || format!("LHS {lhs}"))?;
    ensure(rhs > 2808.3 && rhs < 2809.3, || format!("RHS {rhs}"))?;
    for n in 3..=8 {
        let c = cases.iter().find(|c| c["n"] == n).ok_or(format!("n = {n} missing"))?;
        let m = num(c, "/convexity_margin")?;
        ensure(m > 0.0, || format!("margin {m} at n = {n}"))?;
    }
    ensure(secs < 1.0, || format!("took {secs:.3} s"))?;
    Ok(format!("LHS {lhs:.6}, RHS {rhs:.6}, margins > 0 for n = 3..8, {secs:.3} s"))
}

/// Runs `spec_file` and checks each named experiment's Z-statistic bands.
fn clt_bands(spec_file: &str, names: &[&str], mean_tol: f64, var: (f64, f64), ks_tol: f64, limit: f64) -> Outcome {
    let dir = tempdir()?;
    let (code, _, secs) = cli(dir.path(), &["verify", spec(spec_file).to_str().unwrap()])?;
    let mut notes = Vec::new();
    for name in names {
        let r = read_json(&dir.path().join(format!("{name}.json")))?;
        let row = &r["rows"][0];
        let (z, v, ks) = (num(row, "/z_mean")?, num(row, "/z_variance")?, num(row, "/ks_distance")?);
        ensure(z.abs() < mean_tol, || format!("{name}: mean(Z) = {z}"))?;
        ensure(v >= var.0 && v <= var.1, || format!("{name}: var(Z) = {v}"))?;
        ensure(ks < ks_tol, || format!("{name}: KS = {ks}"))?;
        notes.push(format!("{name}: mean {z:.4}, var {v:.4}, KS {ks:.4}"));
    }
    ensure(code == 0, || format!("exit code {code}"))?;
    ensure(secs < limit, || format!("took {secs:.1} s"))?;
    Ok(format!("{} ({secs:.1} s)", notes.join("; ")))
}

fn mult_constant() -> Outcome {
    let dir = tempdir()?;
    let (code, _, secs) = cli(dir.path(), &["verify", spec("mult_constant_explog1.json").to_str().unwrap()])?;
    let r = read_json(&dir.path().join("mult_cauchy_constant_explog1.json"))?;
    let scaled = num(&r["rows"][0], "/scaled_mean")?;
    // e(γ − 1)
    let target = -1.149_246_975_455_303;
    ensure((scaled - target).abs() < 0.06, || format!("mean of ln(n)(P_n − e) = {scaled}"))?;
    ensure(code == 0, || format!("exit code {code}"))?;
    ensure(secs < 300.0, || format!("took {secs:.1} s"))?;
    Ok(format!("mean {scaled:.5} vs {target:.5} ({secs:.1} s)"))
}

fn slln_trend() -> Outcome {
    let dir = tempdir()?;
    let (code, _, _) = cli(dir.path(), &["verify", spec("slln_all_kinds.json").to_str().unwrap()])?;
    let mut kinds = Vec::new();
    for entry in std::fs::read_dir(dir.path()).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        if !path.to_string_lossy().ends_with(".json") {
            continue;
        }
        let r = read_json(&path)?;
        let rows = r["rows"].as_array().ok_or("no rows")?;
        let (first, last) = (&rows[0], &rows[rows.len() - 1]);
        ensure(first["n"] == 100 && last["n"] == 100_000, || "grid must run from 10^2 to 10^5".into())?;
        let (d0, d1) = (num(first, "/mean_abs_deviation")?, num(last, "/mean_abs_deviation")?);
        let label = r["mean_label"].as_str().unwrap_or("?").to_string();
        ensure(d1 < d0, || format!("{label}: {d1} not below {d0}"))?;
        let root_n = r["mean_kind"]["type"] != "mult_cauchy";
        ensure(!root_n || d1 < 1e-2, || format!("{label}: {d1} not below 1e-2"))?;
        kinds.push(r["mean_kind"]["type"].as_str().unwrap_or("?").to_string());
    }
    kinds.sort();
    kinds.dedup();
    ensure(kinds.len() == 7, || format!("only {} kinds covered", kinds.len()))?;
    ensure(code == 0, || format!("exit code {code}"))?;
    Ok("all seven kinds shrink from n = 10^2 to 10^5".into())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn exact_reductions() -> Outcome {
    let mut rng = CounterRng::new(0x7ED, 0);
    let mut u = |lo: f64, hi: f64| lo + (hi - lo) * rng.open01();
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let (g, mean_f) = match i % 4 {
            0 => (Generator::identity(), u(-50.0, 50.0)),
            1 => (Generator::ln(), u(-5.0, 5.0)),
            2 => (Generator::reciprocal(), u(0.01, 20.0)),
            _ => (Generator::power(u(0.2, 3.0)), u(0.01, 20.0)),
        };
        let var_f = u(1e-6, 50.0);
        let m = MomentSet {
            mean_pf: Some(mean_f),
            mean_p: Some(1.0),
            var_pf: Some(var_f),
            var_p: Some(0.0),
            cov_pf_p: Some(0.0),
            ..Default::default()
        };
        let b = bajraktarevic_clt_params(&g, &m).map_err(|e| e.to_string())?;
        let q = quasi_arithmetic_clt_params(&g, mean_f, var_f).map_err(|e| e.to_string())?;
        let (bv, qv) = (b.asym_variance().ok_or("no variance")?, q.asym_variance().ok_or("no variance")?);
        worst = worst.max(rel(bv, qv));
        ensure(rel(bv, qv) <= 1e-12 && b.limit == q.limit, || format!("{}: {bv} vs {qv}", g.label()))?;

        let (mu, v, xi) = (u(-3.0, 3.0), u(1e-6, 4.0), u(0.1, 100.0));
        let m = MomentSet { mean_logs: Some(mu), var_logs: Some(v), mean_xi: Some(xi), ..Default::default() };
        let geo = geometric_clt_params(&m).map_err(|e| e.to_string())?;
        let ec = exp_cauchy_clt_params(&m).map_err(|e| e.to_string())?;
        let lc = log_cauchy_clt_params(&m).map_err(|e| e.to_string())?;
        ensure(ec == geo && lc == geo, || format!("params differ at μ = {mu}, v = {v}"))?;
        let (limit, var) = delta_method(mu, v, &ExpMap).map_err(|e| e.to_string())?;
        ensure(limit == geo.limit && Some(var) == geo.asym_variance(), || format!("delta method differs at μ = {mu}"))?;
        ensure(rel(var, v * (2.0 * mu).exp()) <= 1e-14, || format!("e^(2μ)·v mismatch at μ = {mu}"))?;
    }
    Ok(format!("1000 moment sets, worst relative gap {worst:.1e}"))
}

fn structure_sweeps() -> Outcome {
    let seed = 0x5EED;
    let sweeps = [
        sweep_mean_axioms(10_000, seed),
        sweep_chain(10_000, seed + 1),
        sweep_entropy(10_000, seed + 2),
        sweep_qa_bisymmetry(10_000, seed + 3),
    ];
    for s in &sweeps {
        ensure(s.pass(), || format!("{}: {} violations, first {:?}", s.name, s.violations, s.first_violation))?;
    }
    let w = falsify_bisymmetry_g(&[0.5, 1.0, 2.0, 4.0]).map_err(|e| e.to_string())?;
    ensure(w.refined_gap.abs() > 1e-6, || format!("G gap {}", w.refined_gap))?;
    Ok(format!("4 × 10^4 trials without violation, G gap {:.6}", w.refined_gap))
}

fn census(pops: &[u64]) -> Census {
    Census::new(
        pops.iter().enumerate().map(|(i, &p)| StateRecord { name: format!("S{i:02}"), population: p }).collect(),
    )
    .expect("valid census")
}

/// Huntington–Hill by exact integer comparison of `N²/(r(r+1))`, handing out
/// seats on top of `start` until the house is full.
fn huntington_hill_from(c: &Census, house: u64, mut seats: Vec<u64>) -> Vec<u64> {
    let st = c.states();
    let claim = |i: usize, seats: &[u64]| {
        let n = u128::from(st[i].population);
        (n * n, u128::from(seats[i]) * u128::from(seats[i] + 1))
    };
    while seats.iter().sum::<u64>() < house {
        let best = (0..st.len())
            .max_by(|&a, &b| {
                let ((na, da), (nb, db)) = (claim(a, &seats), claim(b, &seats));
                (na * db)
                    .cmp(&(nb * da))
                    .then(st[a].population.cmp(&st[b].population))
                    .then_with(|| st[b].name.cmp(&st[a].name))
            })
            .expect("non-empty census");
        seats[best] += 1;
    }
    seats
}

fn floors(c: &Census, house: u64) -> Vec<u64> {
    let total: u128 = c.states().iter().map(|s| u128::from(s.population)).sum();
    c.states().iter().map(|s| ((u128::from(house) * u128::from(s.population) / total) as u64).max(1)).collect()
}

fn allocate(c: &Census, method: MeanKind) -> Result<Vec<u64>, String> {
    let cfg =
        ApportionmentConfig::new(DEFAULT_HOUSE_SIZE, method, ApportionMode::Iterative).map_err(|e| e.to_string())?;
    Ok(apportion(c, &cfg).map_err(|e| e.to_string())?.seats())
}

fn apportionment() -> Outcome {
    let house = DEFAULT_HOUSE_SIZE;
    let (mut done, mut skipped, mut classic_agree, mut stream) = (0, 0, 0, 0u64);
    while done < 100 {
        let mut rng = CounterRng::new(0xA990, stream);
        stream += 1;
        let states = 5 + (rng.open01() * 46.0) as usize;
        let pops: Vec<u64> = (0..states).map(|_| 10f64.powf(4.0 + 3.6 * rng.open01()) as u64).collect();
        let c = census(&pops);
        // a census whose floor allocation already exceeds the house is
        // rejected by design
        if initial_allocation(&c, house).is_err() {
            skipped += 1;
            continue;
        }
        done += 1;
        let seats = allocate(&c, MeanKind::QuasiArithmetic(Generator::ln()))?;
        ensure(seats.iter().sum::<u64>() == house, || format!("census {stream}: sum {}", seats.iter().sum::<u64>()))?;
        ensure(seats.iter().all(|&s| s >= 1), || format!("census {stream}: a state got no seat"))?;
        let start = floors(&c, house);
        ensure(seats == huntington_hill_from(&c, house, start.clone()), || format!("census {stream}: oracle differs"))?;
        let classic = huntington_hill_from(&c, house, vec![1; states]);
        if classic.iter().zip(&start).all(|(h, f)| h >= f) {
            ensure(seats == classic, || format!("census {stream}: classic divisor method differs"))?;
            classic_agree += 1;
        }
        let (a, b) = (-0.5 - 3.0 * rng.open01(), 4.0 * rng.open01() - 2.0);
        let moved = allocate(&c, MeanKind::QuasiArithmetic(Generator::ln().affine(a, b)))?;
        ensure(moved == seats, || format!("census {stream}: affine generator changes the allocation"))?;
        let b2 = allocate(&c, MeanKind::ExpCauchy)?;
        let recip = allocate(&c, MeanKind::QuasiArithmetic(Generator::reciprocal()))?;
        ensure(b2 == recip, || format!("census {stream}: B_2 and 1/x differ"))?;
    }
    Ok(format!(
        "100 censuses match the oracle ({classic_agree} also match one-seat-start HH; {skipped} oversubscribed draws skipped)"
    ))
}

fn strip_wall_clock(text: &str) -> String {
    text.lines().filter(|l| !l.contains("\"wall_clock_secs\"")).collect::<Vec<_>>().join("\n")
}

fn determinism() -> Outcome {
    let files = |threads: &str, args: &[&str]| -> Result<Vec<(String, String)>, String> {
        let dir = tempdir()?;
        let mut all = vec!["--threads", threads];
        all.extend_from_slice(args);
        let (code, _, _) = cli(dir.path(), &all)?;
        ensure(code == 0, || format!("exit code {code} at {threads} threads"))?;
        let mut out = Vec::new();
        for entry in std::fs::read_dir(dir.path()).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
            out.push((path.file_name().unwrap().to_string_lossy().into_owned(), strip_wall_clock(&text)));
        }
        out.sort();
        Ok(out)
    };
    let thm = spec("thm22_explog2.json");
    let runs: [&[&str]; 2] = [&["verify", thm.to_str().unwrap()], &["verify", "--suite", "bisym"]];
    let mut count = 0;
    for args in runs {
        let (one, eight) = (files("1", args)?, files("8", args)?);
        ensure(one.len() == eight.len() && !one.is_empty(), || "different report sets".into())?;
        for ((na, a), (nb, b)) in one.iter().zip(&eight) {
            ensure(na == nb && a == b, || format!("{na} differs between 1 and 8 threads"))?;
        }
        count += one.len();
    }
    Ok(format!("{count} report files byte-identical at 1 and 8 threads"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 L_n counterexample and convexity margins", bisym_reproduction),
        ("2 exp/log Cauchy CLT on ExpLog(2)", || {
            clt_bands(
                "thm22_explog2.json",
                &["exp_cauchy_clt_explog2", "log_cauchy_clt_explog2"],
                0.08,
                (0.90, 1.10),
                0.05,
                60.0,
            )
        }),
        ("3 Bajraktarevic CLT on lognormal", || {
            clt_bands(
                "bajraktarevic_lognormal.json",
                &["bajraktarevic_clt_lognormal"],
                0.08,
                (0.90, 1.10),
                0.05,
                f64::INFINITY,
            )
        }),
        ("4 ln(n) constant for P_n on ExpLog(1)", mult_constant),
        ("5 CLT for ln P_n on ExpLog(1)", || {
            clt_bands("mult_clt_explog1.json", &["mult_cauchy_clt_explog1"], 0.1, (0.85, 1.15), 0.08, f64::INFINITY)
        }),
        ("6 SLLN trend for all kinds", slln_trend),
        ("7 exact reductions", exact_reductions),
        ("8 structural sweeps", structure_sweeps),
        ("9 apportionment", apportionment),
        ("10 determinism across thread counts", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.1} s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} [{secs:.1} s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
