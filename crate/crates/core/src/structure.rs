//! Structural checks: mean axioms, the inequality chain that makes `P_n` a
//! strict mean, the entropy bound, and bisymmetry (including numerical
//! counterexamples for the Cauchy quotient means).

use rand_core::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MeanError, StructureError};
use crate::generator::{Generator, WeightFunction};
use crate::means::{evaluate_mean, MeanKind};
use crate::numeric::{all_equal, log_add_exp, min_max, pairwise_sum};
use crate::rng::CounterRng;
use crate::sample::{Domain, Sample};

/// Tolerance on a bisymmetry gap below which the equation counts as holding.
pub const BISYMMETRY_TOLERANCE: f64 = 1e-10;
const SYMMETRY_TOLERANCE: f64 = 1e-12;
const CHAIN_SLACK: f64 = 1e-12;
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomVerdict {
    pub value: f64,
    /// `min ≤ M ≤ max`.
    pub bounds: bool,
    /// `min < M < max`; `None` when all inputs are equal.
    pub strict: Option<bool>,
    /// Invariance under a random permutation.
    pub symmetric: bool,
}

impl AxiomVerdict {
    pub fn holds(&self) -> bool {
        self.bounds && self.strict.unwrap_or(true) && self.symmetric
    }
}

/// Evaluates `kind` on `xs` and on a permutation of `xs` drawn from `seed`.
pub fn check_mean_axioms(kind: &MeanKind, xs: &Sample, seed: u64) -> Result<AxiomVerdict, StructureError> {
    let value = evaluate_mean(kind, xs)?;
    let (lo, hi) = min_max(xs.values());
    let mut perm = xs.values().to_vec();
    let mut rng = CounterRng::new(seed, 0);
    for i in (1..perm.len()).rev() {
        let j = (rng.open01() * (i + 1) as f64) as usize;
        perm.swap(i, j.min(i));
    }
    let permuted = evaluate_mean(kind, &Sample::new(perm, xs.domain())?)?;
    Ok(AxiomVerdict {
        value,
        bounds: lo <= value && value <= hi,
        strict: (!all_equal(xs.values())).then_some(lo < value && value < hi),
        symmetric: (permuted - value).abs() <= SYMMETRY_TOLERANCE * value.abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainVerdict {
    /// `n ln n · y₁`.
    pub lower: f64,
    /// `Σ yᵢ ln(S/yᵢ)`.
    pub middle: f64,
    /// `n ln n · yₙ`.
    pub upper: f64,
    pub holds: bool,
    /// Both inequalities strict; `None` when all `yᵢ` are equal.
    pub strict: Option<bool>,
}

/// Checks `n ln n · y₁ ≤ Σ yᵢ ln(S/yᵢ) ≤ n ln n · yₙ` for ascending positive
/// `ys`, where `S = Σ yᵢ`.
pub fn strict_inequality_pn(ys: &[f64]) -> Result<ChainVerdict, StructureError> {
    if ys.len() < 2 {
        return Err(MeanError::TooFewValues { required: 2, got: ys.len() }.into());
    }
    if let Some(&bad) = ys.iter().find(|&&y| !(y > 0.0 && y.is_finite())) {
        return Err(StructureError::Domain(bad));
    }
    if ys.windows(2).any(|w| w[0] > w[1]) {
        return Err(StructureError::NotSorted);
    }
    let n = ys.len() as f64;
    let s = pairwise_sum(ys);
    let middle = pairwise_sum(&ys.iter().map(|&y| y * (s / y).ln()).collect::<Vec<_>>());
    let lower = n * n.ln() * ys[0];
    let upper = n * n.ln() * ys[ys.len() - 1];
    let slack = CHAIN_SLACK * upper;
    Ok(ChainVerdict {
        lower,
        middle,
        upper,
        holds: lower <= middle + slack && middle <= upper + slack,
        strict: (!all_equal(ys)).then_some(lower < middle && middle < upper),
    })
}

/// Strictly positive probabilities summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(p: Vec<f64>) -> Result<Self, StructureError> {
        if p.len() < 2 {
            return Err(StructureError::ProbVector("needs at least two entries".into()));
        }
        if let Some(x) = p.iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            return Err(StructureError::ProbVector(format!("entry {x} is outside (0, 1)")));
        }
        let total = pairwise_sum(&p);
        if (total - 1.0).abs() > 1e-12 {
            return Err(StructureError::ProbVector(format!("entries sum to {total}")));
        }
        Ok(ProbVector(p))
    }

    /// Normalises positive weights, as in `pᵢ = yᵢ / Σ yⱼ`.
    pub fn from_weights(w: &[f64]) -> Result<Self, StructureError> {
        let total = pairwise_sum(w);
        ProbVector::new(w.iter().map(|x| x / total).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyVerdict {
    pub entropy: f64,
    pub ln_n: f64,
    /// `n ln n · max pᵢ`.
    pub upper: f64,
    pub holds: bool,
}

/// Checks `−Σ pᵢ ln pᵢ ≤ ln n ≤ n ln n · max pᵢ`.
pub fn entropy_bound(p: &ProbVector) -> EntropyVerdict {
    let ps = p.probs();
    let n = ps.len() as f64;
    let entropy = -pairwise_sum(&ps.iter().map(|&x| x * x.ln()).collect::<Vec<_>>());
    let ln_n = n.ln();
    let upper = n * ln_n * ps.iter().copied().fold(0.0, f64::max);
    let slack = CHAIN_SLACK * upper.max(1.0);
    EntropyVerdict { entropy, ln_n, upper, holds: entropy <= ln_n + slack && ln_n <= upper + slack }
}

/// The four arguments of the bisymmetry equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisymQuadruple {
    pub x: f64,
    pub y: f64,
    pub s: f64,
    pub t: f64,
}

impl BisymQuadruple {
    pub fn new(x: f64, y: f64, s: f64, t: f64) -> Self {
        BisymQuadruple { x, y, s, t }
    }

    fn from_array(a: [f64; 4]) -> Self {
        BisymQuadruple { x: a[0], y: a[1], s: a[2], t: a[3] }
    }
}

/// `M(M(x,y), M(s,t)) − M(M(x,s), M(y,t))`.
pub fn bisymmetry_gap<M>(m: M, q: BisymQuadruple) -> Result<f64, StructureError>
where
    M: Fn(f64, f64) -> Result<f64, StructureError>,
{
    let left = m(m(q.x, q.y)?, m(q.s, q.t)?)?;
    let right = m(m(q.x, q.s)?, m(q.y, q.t)?)?;
    Ok(left - right)
}

/// A two-argument map built from a mean kind, for [`bisymmetry_gap`].
pub fn mean2_map(kind: &MeanKind) -> impl Fn(f64, f64) -> Result<f64, StructureError> + '_ {
    move |a, b| Ok(crate::means::mean2(kind, a, b)?)
}

fn check_above_one(v: f64) -> Result<(), StructureError> {
    if v > 1.0 && v.is_finite() {
        Ok(())
    } else {
        Err(StructureError::Domain(v))
    }
}

/// `F(x, y) = (x^{1/(n−1)} ln y + y^{1/(n−1)} ln x) / ln(xy)` on `(1, ∞)²`.
pub fn f_functional(n: u32, x: f64, y: f64) -> Result<f64, StructureError> {
    if n < 2 {
        return Err(StructureError::Domain(f64::from(n)));
    }
    check_above_one(x)?;
    check_above_one(y)?;
    let (rx, ry) = if n == 2 { (x, y) } else { (x.powf(1.0 / f64::from(n - 1)), y.powf(1.0 / f64::from(n - 1))) };
    Ok((rx * y.ln() + ry * x.ln()) / (x * y).ln())
}

/// `ln F` as a function of `ln x` and `ln y`, so arguments like
/// `e^{2(n−1)²}` stay representable.
pub fn log_f_functional(n: u32, lx: f64, ly: f64) -> Result<f64, StructureError> {
    if n < 2 {
        return Err(StructureError::Domain(f64::from(n)));
    }
    for v in [lx, ly] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(StructureError::Domain(v.exp()));
        }
    }
    let k = f64::from(n - 1);
    Ok(log_add_exp(lx / k + ly.ln(), ly / k + lx.ln()) - (lx + ly).ln())
}

/// `G(a, b) = (a+b) ln(a+b) − a ln a − b ln b` on `(0, ∞)²`.
pub fn g_functional(a: f64, b: f64) -> Result<f64, StructureError> {
    for v in [a, b] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(StructureError::Domain(v));
        }
    }
    Ok((a + b) * (a + b).ln() - (a * a.ln() + b * b.ln()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleL {
    pub n: u32,
    /// `(ln x, ln y, ln s, ln t)`.
    pub log_quadruple: [f64; 4],
    /// `ln` of `F(F(x,y), F(s,t))`.
    pub log_lhs: f64,
    /// `ln` of `F(F(x,s), F(y,t))`.
    pub log_rhs: f64,
    /// The sides themselves (`n = 2` only; larger `n` overflows).
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    /// `ln((e^{n−1}+2)/3) − (n−1) ln((e+2)/3)`, for `n > 2`.
    pub convexity_margin: Option<f64>,
    pub pass: bool,
}

/// Numerical form of the argument that `L_n` is not bisymmetric.
///
/// For `n = 2` the quadruple `x = y = e¹⁰, s = e, t = e²` must give
/// `LHS < 2800 < RHS`. For `n > 2` the substitution
/// `x = y = e^{2(n−1)²}, s = t = e^{(n−1)²}` reduces bisymmetry to
/// `((e+2)/3)^{n−1} = (e^{n−1}+2)/3`, which strict convexity of `u ↦ u^{n−1}`
/// rules out; the margin is evaluated in log scale.
pub fn reproduce_counterexample_l(n: u32) -> Result<CounterexampleL, StructureError> {
    if n < 2 {
        return Err(StructureError::Domain(f64::from(n)));
    }
    let k = f64::from(n - 1);
    let q = if n == 2 { [10.0, 10.0, 1.0, 2.0] } else { [2.0 * k * k, 2.0 * k * k, k * k, k * k] };
    let lf = |a: f64, b: f64| log_f_functional(n, a, b);
    let log_lhs = lf(lf(q[0], q[1])?, lf(q[2], q[3])?)?;
    let log_rhs = lf(lf(q[0], q[2])?, lf(q[1], q[3])?)?;
    if n == 2 {
        let (lhs, rhs) = (log_lhs.exp(), log_rhs.exp());
        return Ok(CounterexampleL {
            n,
            log_quadruple: q,
            log_lhs,
            log_rhs,
            lhs: Some(lhs),
            rhs: Some(rhs),
            convexity_margin: None,
            pass: lhs < 2800.0 && 2800.0 < rhs,
        });
    }
    let e = std::f64::consts::E;
    let margin = (log_add_exp(k, 2f64.ln()) - 3f64.ln()) - k * ((e + 2.0) / 3.0).ln();
    Ok(CounterexampleL {
        n,
        log_quadruple: q,
        log_lhs,
        log_rhs,
        lhs: None,
        rhs: None,
        convexity_margin: Some(margin),
        pass: margin > 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GWitness {
    /// Best grid quadruple (lexicographically smallest among exact ties).
    pub coarse: BisymQuadruple,
    pub coarse_gap: f64,
    /// After golden-section refinement inside the grid cell around `coarse`.
    pub refined: BisymQuadruple,
    pub refined_gap: f64,
}

fn g_gap(a: [f64; 4]) -> f64 {
    bisymmetry_gap(g_functional, BisymQuadruple::from_array(a)).unwrap_or(0.0)
}

/// Maximises `|gap|` of `G` over `grid⁴`, then refines each coordinate in turn
/// by golden-section search between its neighbouring grid values.
///
/// Fails with [`StructureError::NoWitness`] when no quadruple reaches a gap
/// of `1e-6`.
pub fn falsify_bisymmetry_g(grid: &[f64]) -> Result<GWitness, StructureError> {
    let mut g: Vec<f64> = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    if let Some(&bad) = g.iter().find(|&&v| !(v > 0.0 && v <= 10.0)) {
        return Err(StructureError::Domain(bad));
    }
    let m = g.len();
    let mut best = ([0usize; 4], 0.0f64);
    for i in 0..m.pow(4) {
        let idx = [i / (m * m * m), (i / (m * m)) % m, (i / m) % m, i % m];
        let gap = g_gap(idx.map(|j| g[j]));
        // gaps equal up to rounding count as ties, which scan order resolves
        // in favour of the lexicographically smallest quadruple
        if gap.abs() > best.1.abs() * (1.0 + TIE_TOLERANCE) {
            best = (idx, gap);
        }
    }
    if best.1.abs() <= 1e-6 {
        return Err(StructureError::NoWitness(best.1));
    }
    let coarse = best.0.map(|j| g[j]);
    let mut point = coarse;
    for _sweep in 0..3 {
        for c in 0..4 {
            let j = best.0[c];
            let lo = if j > 0 { g[j - 1] } else { 0.5 * g[0] };
            let hi = if j + 1 < m { g[j + 1] } else { (2.0 * g[m - 1]).min(10.0) };
            let score = |v: f64| {
                let mut p = point;
                p[c] = v;
                g_gap(p).abs()
            };
            let v = golden_max(score, lo, hi);
            if score(v) > score(point[c]) {
                point[c] = v;
            }
        }
    }
    Ok(GWitness {
        coarse: BisymQuadruple::from_array(coarse),
        coarse_gap: best.1,
        refined: BisymQuadruple::from_array(point),
        refined_gap: g_gap(point),
    })
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

/// Outcome of a randomized property sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub name: String,
    pub trials: usize,
    pub violations: usize,
    /// Description of the first violating trial, if any.
    pub first_violation: Option<String>,
}

impl SweepResult {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

/// Runs `trial` for indices `0..trials` in parallel, each on its own stream
/// of `seed`, and gathers failures in index order.
fn sweep<F>(name: &str, trials: usize, seed: u64, trial: F) -> SweepResult
where
    F: Fn(&mut CounterRng) -> Result<(), String> + Sync,
{
    let failures: Vec<(usize, String)> = (0..trials)
        .into_par_iter()
        .filter_map(|i| trial(&mut CounterRng::new(seed, i as u64)).err().map(|e| (i, e)))
        .collect();
    SweepResult {
        name: name.into(),
        trials,
        violations: failures.len(),
        first_violation: failures.first().map(|(i, e)| format!("trial {i}: {e}")),
    }
}

fn uniform(rng: &mut CounterRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.open01()
}

fn below(rng: &mut CounterRng, k: usize) -> usize {
    ((rng.open01() * k as f64) as usize).min(k - 1)
}

/// `n` values on the lattice `offset + 0.01·{1, …, 9999}`; the spacing keeps
/// distinct inputs distinguishable after rounding.
fn lattice(rng: &mut CounterRng, n: usize, offset: f64) -> Vec<f64> {
    (0..n).map(|_| offset + 0.01 * (1 + below(rng, 9999)) as f64).collect()
}

fn random_generator(rng: &mut CounterRng) -> Generator {
    match below(rng, 4) {
        0 => Generator::identity(),
        1 => Generator::ln(),
        2 => Generator::reciprocal(),
        _ => {
            let p = uniform(rng, 0.05, 3.0);
            Generator::power(if rng.open01() < 0.5 { -p } else { p })
        }
    }
}

fn random_kind(rng: &mut CounterRng, which: usize) -> MeanKind {
    match which {
        0 => MeanKind::QuasiArithmetic(random_generator(rng)),
        1 => {
            let g = random_generator(rng);
            MeanKind::Bajraktarevic(g, WeightFunction::power(uniform(rng, -3.0, 3.0)))
        }
        2 => MeanKind::Gini { r: uniform(rng, -5.0, 5.0), s: uniform(rng, -5.0, 5.0) },
        3 => MeanKind::Holder { p: uniform(rng, -8.0, 8.0) },
        4 => MeanKind::ExpCauchy,
        5 => MeanKind::LogCauchy,
        _ => MeanKind::MultCauchy,
    }
}

/// Bounds, strictness and symmetry for every mean kind in turn, on random
/// tuples of length 2 to 10.
pub fn sweep_mean_axioms(trials: usize, seed: u64) -> SweepResult {
    sweep("mean_axioms", trials, seed, |rng| {
        let which = below(rng, 7);
        let kind = random_kind(rng, which);
        let n = 2 + below(rng, 9);
        let (values, domain) = match kind.required_domain() {
            Domain::GreaterThanOne => (lattice(rng, n, 1.0), Domain::GreaterThanOne),
            _ => (lattice(rng, n, 0.0), Domain::Positive),
        };
        let xs = Sample::new(values.clone(), domain).map_err(|e| e.to_string())?;
        let v = check_mean_axioms(&kind, &xs, rng.next_u64()).map_err(|e| format!("{}: {e}", kind.label()))?;
        if v.holds() {
            Ok(())
        } else {
            Err(format!("{} on {values:?}: {v:?}", kind.label()))
        }
    })
}

/// The chain `n ln n · y₁ ≤ Σ yᵢ ln(S/yᵢ) ≤ n ln n · yₙ`, strict for
/// non-constant inputs, on sorted random `y` of length 2 to 10.
pub fn sweep_chain(trials: usize, seed: u64) -> SweepResult {
    sweep("pn_chain", trials, seed, |rng| {
        let n = 2 + below(rng, 9);
        let mut ys = lattice(rng, n, 0.0);
        ys.sort_by(f64::total_cmp);
        let v = strict_inequality_pn(&ys).map_err(|e| e.to_string())?;
        if v.holds && v.strict.unwrap_or(true) {
            Ok(())
        } else {
            Err(format!("{ys:?}: {v:?}"))
        }
    })
}

/// `−Σ pᵢ ln pᵢ ≤ ln n ≤ n ln n · max pᵢ` on random probability vectors
/// with up to 20 entries.
pub fn sweep_entropy(trials: usize, seed: u64) -> SweepResult {
    sweep("entropy_bound", trials, seed, |rng| {
        let n = 2 + below(rng, 19);
        let w: Vec<f64> = (0..n).map(|_| uniform(rng, 1e-3, 1.0)).collect();
        let p = ProbVector::from_weights(&w).map_err(|e| e.to_string())?;
        let v = entropy_bound(&p);
        if v.holds {
            Ok(())
        } else {
            Err(format!("{:?}: {v:?}", p.probs()))
        }
    })
}

/// Bisymmetry of random quasi-arithmetic 2-means on random quadruples.
pub fn sweep_qa_bisymmetry(trials: usize, seed: u64) -> SweepResult {
    sweep("qa_bisymmetry", trials, seed, |rng| {
        let kind = MeanKind::QuasiArithmetic(random_generator(rng));
        let q = BisymQuadruple::new(
            uniform(rng, 0.05, 50.0),
            uniform(rng, 0.05, 50.0),
            uniform(rng, 0.05, 50.0),
            uniform(rng, 0.05, 50.0),
        );
        let gap = bisymmetry_gap(mean2_map(&kind), q).map_err(|e| e.to_string())?;
        if gap.abs() <= BISYMMETRY_TOLERANCE {
            Ok(())
        } else {
            Err(format!("{} at {q:?}: gap {gap:e}", kind.label()))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::Generator;
    use std::f64::consts::{E, LN_2};

    #[test]
    fn axioms_examples() {
        let v = check_mean_axioms(&MeanKind::MultCauchy, &Sample::greater_than_one(vec![E, E.powi(3)]).unwrap(), 1)
            .unwrap();
        assert!(v.holds() && v.strict == Some(true));
        let c =
            check_mean_axioms(&MeanKind::Gini { r: 2.0, s: 1.0 }, &Sample::positive(vec![1.7; 3]).unwrap(), 1).unwrap();
        assert!(c.bounds && c.symmetric && c.strict.is_none());
        let b = check_mean_axioms(&MeanKind::ExpCauchy, &Sample::positive(vec![2.0, 6.0]).unwrap(), 1).unwrap();
        assert!((b.value - 3.0).abs() < 1e-14 && b.strict == Some(true));
    }

    #[test]
    fn chain_examples() {
        let eq = strict_inequality_pn(&[1.0, 1.0]).unwrap();
        assert!(eq.holds && eq.strict.is_none());
        assert!((eq.middle - 2.0 * LN_2).abs() < 1e-15);
        let v = strict_inequality_pn(&[1.0, 2.0]).unwrap();
        assert!((v.middle - (3.0 * 3f64.ln() - 2.0 * LN_2)).abs() < 1e-14);
        assert_eq!(v.strict, Some(true));
        assert!(matches!(strict_inequality_pn(&[2.0, 1.0]), Err(StructureError::NotSorted)));
        assert!(matches!(strict_inequality_pn(&[0.0, 1.0]), Err(StructureError::Domain(_))));
    }

    #[test]
    fn entropy_examples() {
        let u = entropy_bound(&ProbVector::new(vec![0.25; 4]).unwrap());
        assert!(u.holds);
        assert!((u.entropy - u.ln_n).abs() < 1e-15 && (u.upper - u.ln_n).abs() < 1e-15);
        assert!(entropy_bound(&ProbVector::new(vec![0.5, 0.5]).unwrap()).holds);
        assert!(ProbVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbVector::new(vec![1.0]).is_err());
    }

    #[test]
    fn quasi_arithmetic_is_bisymmetric() {
        let q = BisymQuadruple::new(1.3, 7.0, 0.2, 4.4);
        let arith = MeanKind::QuasiArithmetic(Generator::identity());
        assert!(bisymmetry_gap(mean2_map(&arith), q).unwrap().abs() < 1e-12);
        let geo = MeanKind::QuasiArithmetic(Generator::ln());
        assert!(bisymmetry_gap(mean2_map(&geo), q).unwrap().abs() < 1e-12);
    }

    #[test]
    fn functional_examples() {
        assert_eq!(f_functional(2, 5.0, 5.0).unwrap(), 5.0);
        assert_eq!(g_functional(1.0, 1.0).unwrap(), 2.0 * LN_2);
        assert!((g_functional(3.0, 3.0).unwrap() - 6.0 * LN_2).abs() < 1e-14);
        assert!(f_functional(2, 1.0, 2.0).is_err());
        assert!(g_functional(0.0, 2.0).is_err());
        let direct = f_functional(3, 20.0, 3.0).unwrap().ln();
        assert!((log_f_functional(3, 20f64.ln(), 3f64.ln()).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn counterexample_n2() {
        let r = reproduce_counterexample_l(2).unwrap();
        assert!(r.pass);
        assert!((r.lhs.unwrap() - 2797.868).abs() < 1e-3, "{:?}", r.lhs);
        assert!((r.rhs.unwrap() - 2808.981).abs() < 1e-3, "{:?}", r.rhs);
    }

    #[test]
    fn counterexample_convexity() {
        let r3 = reproduce_counterexample_l(3).unwrap();
        let direct = ((E * E + 2.0) / 3.0).ln() - 2.0 * ((E + 2.0) / 3.0).ln();
        assert!((r3.convexity_margin.unwrap() - direct).abs() < 1e-14);
        let margins: Vec<f64> =
            (3..=8).map(|n| reproduce_counterexample_l(n).unwrap().convexity_margin.unwrap()).collect();
        assert!(margins.iter().all(|&m| m > 0.0));
        assert!(margins.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn g_witness_on_coarse_grid() {
        let w = falsify_bisymmetry_g(&[0.5, 1.0, 2.0, 4.0]).unwrap();
        // eight quadruples share |gap| at 40 digits; this is the smallest
        assert_eq!(w.coarse, BisymQuadruple::new(0.5, 2.0, 4.0, 2.0));
        assert!((w.coarse_gap + 0.008_279_778_653_921_546).abs() < 1e-12);
        assert!(w.refined_gap.abs() >= w.coarse_gap.abs());
        assert_eq!(falsify_bisymmetry_g(&[0.5, 1.0, 2.0, 4.0]).unwrap(), w);
    }
}
