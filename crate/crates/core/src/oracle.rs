//! Exhaustive enumeration and exact certification on small instances.
//!
//! `D(v, d, m)` is enumerated column by column. Each column runs through the
//! compositions of `m_k` into `v + 1` parts in colexicographic order (the
//! last part is most significant), and columns are compared left to right,
//! so the first column is the outermost loop. This is the canonical order
//! used for optimizer lists; it does not depend on thread scheduling because
//! work is split by first-column composition and merged in index order.
//!
//! All optimum values and certificate equalities are exact rationals. For
//! the E criterion the smallest eigenvalue is pre-screened in floating point;
//! every design within `1e-6` of the float optimum is then re-checked
//! exactly through the definiteness of `N − tI`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value as Json};

use crate::constructors::{
    e_opt_approx, e_opt_exact, verify_approx_e, verify_btib, verify_equal_block_e, verify_exact_e, GhVariant,
};
use crate::criteria::{average_contrast, c_value, Criterion};
use crate::design::{AnyDesign, ApproximateDesign, ExactDesign};
use crate::error::{Error, Result};
use crate::info::{
    compare_lambda_min, contrast_info, inverse_info, is_entrywise_nonnegative, is_feasible, recognize_lambda_min,
    spectrum, InformationMatrix,
};
use crate::io::design_to_json;
use crate::matrix::Matrix;
use crate::scalar::{rat_int, rational_to_f64, Rational, Value};

/// Default cap on the number of designs visited.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Relative window of the float pre-screen for the E criterion.
pub const E_SCREEN_TOL: f64 = 1e-6;

/// All ways to write `total` as an ordered sum of `parts` nonnegative
/// integers, in colexicographic order.
pub fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    fn go(total: u64, parts: usize, suffix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts == 1 {
            let mut c = vec![total];
            c.extend(suffix.iter().rev());
            out.push(c);
            return;
        }
        for last in 0..=total {
            suffix.push(last);
            go(total - last, parts - 1, suffix, out);
            suffix.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// `C(total + parts − 1, parts − 1)`, saturating.
pub fn composition_count(total: u64, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    let k = (parts - 1) as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = match acc.checked_mul(total as u128 + i) {
            Some(x) => x / i,
            None => return u128::MAX,
        };
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationSpace {
    pub v: usize,
    pub d: usize,
    pub m: Vec<u64>,
    pub column_counts: Vec<u128>,
    pub total: u128,
}

impl EnumerationSpace {
    pub fn new(v: usize, m: &[u64]) -> Result<Self> {
        if v == 0 || m.is_empty() {
            return Err(Error::InvalidArgument("need v ≥ 1 and at least one block".into()));
        }
        if let Some(k) = m.iter().position(|&x| x == 0) {
            return Err(Error::ZeroBlockSize { block: k });
        }
        let column_counts: Vec<u128> = m.iter().map(|&mk| composition_count(mk, v + 1)).collect();
        let total = column_counts.iter().fold(1u128, |a, &b| a.saturating_mul(b));
        Ok(Self { v, d: m.len(), m: m.to_vec(), column_counts, total })
    }

    pub fn check_budget(&self, budget: u128) -> Result<()> {
        if self.total > budget {
            return Err(Error::BudgetExceeded { count: self.total, budget });
        }
        Ok(())
    }

    /// `q` when all blocks have the same size.
    pub fn equal_block_size(&self) -> Option<u64> {
        self.m.iter().all(|&x| x == self.m[0]).then_some(self.m[0])
    }

    pub fn to_json(&self) -> Json {
        json!({ "v": self.v, "d": self.d, "m": self.m, "designs": self.total.to_string() })
    }
}

/// The full design space, ready to iterate.
#[derive(Debug, Clone)]
pub struct Enumeration {
    space: EnumerationSpace,
    columns: Vec<Vec<Vec<u64>>>,
}

/// Prepares the enumeration of `D(v, d, m)`, failing if it has more than
/// `budget` designs.
pub fn enumerate_designs(v: usize, m: &[u64], budget: u128) -> Result<Enumeration> {
    let space = EnumerationSpace::new(v, m)?;
    space.check_budget(budget)?;
    let columns = m.iter().map(|&mk| compositions(mk, v + 1)).collect();
    Ok(Enumeration { space, columns })
}

impl Enumeration {
    pub fn space(&self) -> &EnumerationSpace {
        &self.space
    }

    pub fn iter(&self) -> DesignIter<'_> {
        DesignIter::new(self, 0..self.columns[0].len())
    }

    /// Number of work units: one per first-column composition.
    pub fn partitions(&self) -> usize {
        self.columns[0].len()
    }

    /// Designs whose first column is composition number `index`.
    pub fn partition(&self, index: usize) -> DesignIter<'_> {
        DesignIter::new(self, index..index + 1)
    }

    /// Runs `f` on every partition in parallel and returns the results in
    /// partition order.
    pub fn map_partitions<R, F>(&self, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(DesignIter<'_>) -> R + Sync,
    {
        (0..self.partitions()).into_par_iter().map(|i| f(self.partition(i))).collect()
    }
}

impl<'a> IntoIterator for &'a Enumeration {
    type Item = ExactDesign;
    type IntoIter = DesignIter<'a>;

    fn into_iter(self) -> DesignIter<'a> {
        self.iter()
    }
}

/// Odometer over column choices; the last column turns fastest.
pub struct DesignIter<'a> {
    e: &'a Enumeration,
    idx: Vec<usize>,
    first_end: usize,
    done: bool,
}

impl<'a> DesignIter<'a> {
    fn new(e: &'a Enumeration, first: std::ops::Range<usize>) -> Self {
        let mut idx = vec![0; e.columns.len()];
        idx[0] = first.start;
        Self { e, idx, first_end: first.end, done: first.is_empty() }
    }
}

impl Iterator for DesignIter<'_> {
    type Item = ExactDesign;

    fn next(&mut self) -> Option<ExactDesign> {
        if self.done {
            return None;
        }
        let cols: Vec<&[u64]> = self.idx.iter().zip(&self.e.columns).map(|(&i, c)| c[i].as_slice()).collect();
        let design = ExactDesign::from_columns_unchecked(self.e.space.v, &self.e.space.m, &cols);
        let mut k = self.idx.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.idx[k] += 1;
            let end = if k == 0 { self.first_end } else { self.e.columns[k].len() };
            if self.idx[k] < end {
                break;
            }
            if k == 0 {
                self.done = true;
                break;
            }
            self.idx[k] = 0;
        }
        Some(design)
    }
}

/// Exact information matrix and its inverse, or `None` for an infeasible design.
fn exact_inverse(design: &ExactDesign) -> Option<(InformationMatrix<Rational>, Matrix<Rational>)> {
    if !is_feasible(design).feasible {
        return None;
    }
    let n = contrast_info(design).ok()?;
    let inv = inverse_info(&n).ok()?;
    Some((n, inv))
}

/// Minimization key of a criterion that is a rational function of `N⁻¹`.
fn exact_key(inv: &Matrix<Rational>, criterion: Criterion) -> Rational {
    match criterion {
        Criterion::A => inv.trace(),
        Criterion::MV => inv.diagonal().into_iter().max().expect("non-empty"),
        Criterion::R | Criterion::PhiR => inv.diagonal().into_iter().fold(rat_int(1), |a, b| a * b),
        Criterion::VarCovSum => inv.total(),
        Criterion::E | Criterion::C => unreachable!("no rational key for {criterion}"),
    }
}

/// Result of a brute-force optimization over `D(v, d, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub criterion: Criterion,
    pub space: EnumerationSpace,
    /// Optimal criterion value. For `E` this is `λ_min(N)`, the quantity
    /// actually maximized, rather than its reciprocal.
    pub optimum: Value,
    /// Every optimal design, in canonical order.
    pub optimizers: Vec<ExactDesign>,
    pub feasible: u128,
    /// Whether `optimum` and `optimizers` were certified exactly.
    pub exact: bool,
}

impl Optimum {
    pub fn contains(&self, design: &ExactDesign) -> bool {
        self.optimizers.contains(design)
    }

    pub fn to_json(&self) -> Json {
        json!({
            "criterion": self.criterion.name(),
            "space": self.space.to_json(),
            "optimum": self.optimum.to_json(),
            "exact": self.exact,
            "feasible_designs": self.feasible.to_string(),
            "optimizer_count": self.optimizers.len(),
            "optimizers": self.optimizers.iter().map(|x| design_to_json(&x.clone().into())).collect::<Vec<_>>(),
        })
    }
}

struct Partial<K> {
    best: Option<K>,
    optimizers: Vec<ExactDesign>,
    feasible: u128,
}

/// Exhaustive optimum of `criterion` over `D(v, d, m)`.
pub fn brute_force_optimum(v: usize, m: &[u64], criterion: Criterion, budget: u128) -> Result<Optimum> {
    let e = enumerate_designs(v, m, budget)?;
    match criterion {
        Criterion::C => Err(Error::InvalidArgument("brute force over the c criterion needs a contrast; use certify".into())),
        Criterion::E => e_optimum(&e),
        _ => rational_optimum(&e, criterion),
    }
}

fn rational_optimum(e: &Enumeration, criterion: Criterion) -> Result<Optimum> {
    let parts = e.map_partitions(|designs| {
        let mut p = Partial::<Rational> { best: None, optimizers: Vec::new(), feasible: 0 };
        for design in designs {
            let Some((_, inv)) = exact_inverse(&design) else { continue };
            p.feasible += 1;
            let key = exact_key(&inv, criterion);
            match p.best.as_ref().map(|b| key.cmp(b)) {
                Some(Ordering::Greater) => {}
                Some(Ordering::Equal) => p.optimizers.push(design),
                _ => {
                    p.best = Some(key);
                    p.optimizers = vec![design];
                }
            }
        }
        p
    });
    let mut best: Option<Rational> = None;
    let mut optimizers = Vec::new();
    let mut feasible = 0;
    for p in parts {
        feasible += p.feasible;
        let Some(key) = p.best else { continue };
        match best.as_ref().map(|b| key.cmp(b)) {
            Some(Ordering::Greater) => {}
            Some(Ordering::Equal) => optimizers.extend(p.optimizers),
            _ => {
                best = Some(key);
                optimizers = p.optimizers;
            }
        }
    }
    let best = best.ok_or_else(|| no_feasible(e.space()))?;
    let optimum = match criterion {
        Criterion::PhiR => Value::Real((-rational_to_f64(&best).ln() / e.space().v as f64).exp()),
        _ => Value::Exact(best),
    };
    Ok(Optimum { criterion, space: e.space().clone(), optimum, optimizers, feasible, exact: criterion != Criterion::PhiR })
}

fn no_feasible(space: &EnumerationSpace) -> Error {
    Error::EmptyFamily { family: "feasible designs", reason: format!("D({}, {}, {:?}) has no connected design", space.v, space.d, space.m) }
}

fn e_optimum(e: &Enumeration) -> Result<Optimum> {
    // Per partition: float λ_min of every feasible design, keeping those
    // near the partition's best.
    let parts = e.map_partitions(|designs| {
        let mut best = f64::NEG_INFINITY;
        let mut near: Vec<(f64, ExactDesign)> = Vec::new();
        let mut feasible = 0u128;
        for design in designs {
            if !is_feasible(&design).feasible {
                continue;
            }
            feasible += 1;
            let Ok(n) = contrast_info(&design) else { continue };
            let lambda = spectrum(&n).lambda_min;
            if lambda > best {
                best = lambda;
                near.retain(|(l, _)| *l >= best - E_SCREEN_TOL * best.abs().max(1.0));
            }
            if lambda >= best - E_SCREEN_TOL * best.abs().max(1.0) {
                near.push((lambda, design));
            }
        }
        (best, near, feasible)
    });
    let feasible: u128 = parts.iter().map(|p| p.2).sum();
    let best = parts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if feasible == 0 {
        return Err(no_feasible(e.space()));
    }
    let window = E_SCREEN_TOL * best.abs().max(1.0);
    let candidates: Vec<(f64, ExactDesign, InformationMatrix<Rational>)> = parts
        .into_iter()
        .flat_map(|p| p.1)
        .filter(|(l, _)| *l >= best - window)
        .map(|(l, d)| {
            let n = contrast_info(&d).expect("feasible design");
            (l, d, n)
        })
        .collect();

    let exact_best = candidates
        .iter()
        .filter_map(|(l, _, n)| recognize_lambda_min(n, *l))
        .max();
    if let Some(t) = exact_best {
        let mut optimizers = Vec::new();
        let mut beaten = false;
        for (_, d, n) in &candidates {
            match compare_lambda_min(n, &t) {
                Ordering::Equal => optimizers.push(d.clone()),
                Ordering::Greater => beaten = true,
                Ordering::Less => {}
            }
        }
        if !beaten {
            return Ok(Optimum {
                criterion: Criterion::E,
                space: e.space().clone(),
                optimum: Value::Exact(t),
                optimizers,
                feasible,
                exact: true,
            });
        }
    }
    // The optimum is not a recognizable rational: report the float optimum.
    let tight = 1e-9 * best.abs().max(1.0);
    let optimizers = candidates.into_iter().filter(|(l, _, _)| *l >= best - tight).map(|(_, d, _)| d).collect();
    Ok(Optimum { criterion: Criterion::E, space: e.space().clone(), optimum: Value::Real(best), optimizers, feasible, exact: false })
}

/// Outcome of the structural checks run over a whole space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantSweep {
    pub designs: u128,
    pub feasible: u128,
    /// First violations found, in canonical order (at most 20).
    pub violations: Vec<String>,
}

impl InvariantSweep {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks on every design of `D(v, d, m)`:
///
/// * `N(ξ) = n · N(ξ/n)` exactly;
/// * `λ_min(N) ≤ n/(4v) + 1e-9`;
/// * for feasible designs, off-diagonal entries of `N` are `≤ 0` and `N⁻¹`
///   is entrywise nonnegative;
/// * for feasible equal-block designs, `1ᵀN⁻¹1 ≥ q v² / Σ_i μ_0i`.
pub fn sweep_invariants(v: usize, m: &[u64], budget: u128) -> Result<InvariantSweep> {
    const KEEP: usize = 20;
    let e = enumerate_designs(v, m, budget)?;
    let q = e.space().equal_block_size();
    let n_total: u64 = m.iter().sum();
    let bound = n_total as f64 / (4.0 * v as f64) + 1e-9;
    let parts = e.map_partitions(|designs| {
        let mut count = 0u128;
        let mut feasible = 0u128;
        let mut bad = Vec::new();
        for design in designs {
            count += 1;
            let mut fail = |what: &str| {
                if bad.len() < KEEP {
                    bad.push(format!("{what}: {:?}", design.rows()));
                }
            };
            let n = contrast_info(&design).expect("exact design");
            let scaled = contrast_info(&design.normalize()).expect("normalized design");
            let nn = rat_int(design.n());
            if scaled.matrix().map(|x| x.clone() * nn.clone()) != *n.matrix() {
                fail("scaling N(ξ) = n·N(ξ/n)");
            }
            if spectrum(&n).lambda_min > bound {
                fail("λ_min(N) ≤ n/(4v)");
            }
            if !is_feasible(&design).feasible {
                continue;
            }
            feasible += 1;
            let off_ok = (0..v).all(|i| (0..v).all(|j| i == j || !n.matrix()[(i, j)].is_positive()));
            if !off_ok {
                fail("off-diagonal N ≤ 0");
            }
            let inv = match inverse_info(&n) {
                Ok(inv) => inv,
                Err(_) => {
                    fail("feasible design with singular N");
                    continue;
                }
            };
            if !is_entrywise_nonnegative(&inv) {
                fail("N⁻¹ ≥ 0");
            }
            if let Some(q) = q {
                let mu: u64 = (1..=v).map(|i| design.integer_concurrence(0, i)).sum();
                if mu.is_zero() || inv.total() < rat_int(q * (v * v) as u64) / rat_int(mu) {
                    fail("1ᵀN⁻¹1 ≥ qv²/Σμ_0i");
                }
            }
        }
        (count, feasible, bad)
    });
    let mut sweep = InvariantSweep { designs: 0, feasible: 0, violations: Vec::new() };
    for (count, feasible, bad) in parts {
        sweep.designs += count;
        sweep.feasible += feasible;
        sweep.violations.extend(bad);
    }
    sweep.violations.truncate(KEEP);
    Ok(sweep)
}

/// Seeded source of random feasible approximate designs.
///
/// Uses ChaCha8; [`DesignSampler::with_stream`] gives independent,
/// reproducible streams from one seed.
#[derive(Debug, Clone)]
pub struct DesignSampler {
    rng: ChaCha8Rng,
}

/// Rejection limit for [`DesignSampler::sample`].
pub const MAX_ATTEMPTS: usize = 1000;

impl DesignSampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Strictly positive weights summing to one.
    pub fn block_weights(&mut self, d: usize) -> Vec<Rational> {
        let raw: Vec<u64> = (0..d).map(|_| self.rng.random_range(1..=1000)).collect();
        let total = rat_int(raw.iter().sum());
        raw.into_iter().map(|x| rat_int(x) / total.clone()).collect()
    }

    /// Random connected design with rational entries. Each cell is empty
    /// with probability 0.3 and otherwise gets a weight uniform on
    /// `1..=1000`, before normalizing to total one.
    pub fn sample(&mut self, v: usize, d: usize) -> Result<ApproximateDesign<Rational>> {
        if v == 0 || d == 0 {
            return Err(Error::InvalidArgument("need v, d ≥ 1".into()));
        }
        for _ in 0..MAX_ATTEMPTS {
            let raw: Vec<Vec<u64>> = (0..=v)
                .map(|_| {
                    (0..d)
                        .map(|_| if self.rng.random_bool(0.3) { 0 } else { self.rng.random_range(1..=1000) })
                        .collect()
                })
                .collect();
            let total: u64 = raw.iter().flatten().sum();
            if total == 0 || (0..d).any(|k| raw.iter().all(|row| row[k] == 0)) {
                continue;
            }
            let t = rat_int(total);
            let rows = raw.into_iter().map(|row| row.into_iter().map(|x| rat_int(x) / t.clone()).collect()).collect();
            let design = ApproximateDesign::new(rows)?;
            if is_feasible(&design).feasible {
                return Ok(design);
            }
        }
        Err(Error::SamplingFailed { attempts: MAX_ATTEMPTS })
    }
}

/// One random feasible approximate design for `seed`.
pub fn random_feasible_approx(v: usize, d: usize, seed: u64) -> Result<ApproximateDesign<Rational>> {
    DesignSampler::new(seed).sample(v, d)
}

/// Optimality claims checkable by enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Claim {
    /// The exact E-optimal constructor attains the enumerated E-optimum.
    EOptExact,
    /// E-optimal designs meeting the half-block or equal-concurrence
    /// conditions attain the smallest `1ᵀN⁻¹1`.
    VarCovSumMin,
    /// A-optimal BTIB designs with the optimal control total are R-optimal.
    AOptIsROpt,
    /// Approximate E-optimal designs minimize `c̃ᵀM⁻c̃`, `c̃ = (−1, 1ᵀ/v)`.
    EOptCOpt,
    /// Equal-block designs with `q/2` controls per block and equal control
    /// concurrences attain the E-optimum.
    Prop1EOpt,
}

impl Claim {
    pub const ALL: [Claim; 5] = [Claim::EOptExact, Claim::VarCovSumMin, Claim::AOptIsROpt, Claim::EOptCOpt, Claim::Prop1EOpt];

    pub fn name(self) -> &'static str {
        match self {
            Claim::EOptExact => "E_opt_exact",
            Claim::VarCovSumMin => "VarCovSum_min",
            Claim::AOptIsROpt => "A_opt_is_R_opt",
            Claim::EOptCOpt => "E_opt_c_opt",
            Claim::Prop1EOpt => "Prop1_E_opt",
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Claim::EOptExact => "e-exact",
            Claim::VarCovSumMin => "varcov",
            Claim::AOptIsROpt => "a-implies-r",
            Claim::EOptCOpt => "e-c",
            Claim::Prop1EOpt => "prop1",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Claim::ALL
            .into_iter()
            .find(|c| c.token().eq_ignore_ascii_case(s) || c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown claim `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertifyOptions {
    pub budget: u128,
    pub seed: u64,
    /// Random approximate designs added to the comparison set of [`Claim::EOptCOpt`].
    pub samples: usize,
    pub variant: GhVariant,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, seed: 0, samples: 1000, variant: GhVariant::Corrected }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub claim: Claim,
    pub space: EnumerationSpace,
    /// Optimum of the criterion the claim is about.
    pub optimum: Value,
    /// Designs attaining `optimum`, in canonical order.
    pub optimizers: Vec<AnyDesign>,
    /// Designs the claim says are optimal.
    pub nominated: Vec<AnyDesign>,
    pub holds: bool,
    /// No design of the nominated family exists on this instance.
    pub vacuous: bool,
    /// Further named optima, e.g. the A-optimum next to the R-optimum.
    pub values: Vec<(String, Value)>,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn value(&self, name: &str) -> Option<&Value> {
        self.values.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    pub fn to_json(&self) -> Json {
        let values: serde_json::Map<String, Json> = self.values.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
        json!({
            "claim": self.claim.name(),
            "instance": self.space.to_json(),
            "optimum": self.optimum.to_json(),
            "optimizer_count": self.optimizers.len(),
            "first_optimizer": self.optimizers.first().map(design_to_json),
            "nominated_count": self.nominated.len(),
            "holds": self.holds,
            "vacuous": self.vacuous,
            "values": values,
            "notes": self.notes,
        })
    }
}

fn exact_any(designs: &[ExactDesign]) -> Vec<AnyDesign> {
    designs.iter().cloned().map(AnyDesign::from).collect()
}

/// Checks `claim` on `D(v, d, m)` by enumeration.
///
/// An instance on which the nominated family is empty yields a vacuous
/// certificate with `holds = true` rather than an error.
pub fn certify(claim: Claim, v: usize, m: &[u64], opts: &CertifyOptions) -> Result<Certificate> {
    let space = EnumerationSpace::new(v, m)?;
    space.check_budget(opts.budget)?;
    match claim {
        Claim::EOptExact => certify_e_exact(space, opts),
        Claim::VarCovSumMin => certify_varcov(space, opts),
        Claim::AOptIsROpt => certify_a_r(space, opts),
        Claim::EOptCOpt => certify_e_c(space, opts),
        Claim::Prop1EOpt => certify_prop1(space, opts),
    }
}

fn certify_e_exact(space: EnumerationSpace, opts: &CertifyOptions) -> Result<Certificate> {
    let e = brute_force_optimum(space.v, &space.m, Criterion::E, opts.budget)?;
    let mut notes = Vec::new();
    let nominated = match e_opt_exact(space.v, &space.m) {
        Ok(d) => vec![d],
        Err(Error::EmptyFamily { reason, .. }) => {
            notes.push(format!("no exact E-optimal construction: {reason}"));
            Vec::new()
        }
        Err(err) => return Err(err),
    };
    let n = rat_int(space.m.iter().sum());
    let bound = n / rat_int(4 * space.v as u64);
    if let Some(opt) = e.optimum.as_exact() {
        if *opt == bound {
            notes.push("optimum equals n/(4v)".into());
        }
    }
    let vacuous = nominated.is_empty();
    let holds = e.exact && nominated.iter().all(|d| e.contains(d));
    Ok(Certificate {
        claim: Claim::EOptExact,
        space,
        optimum: e.optimum.clone(),
        optimizers: exact_any(&e.optimizers),
        nominated: exact_any(&nominated),
        holds,
        vacuous,
        values: vec![("lambda_min".into(), e.optimum), ("n_over_4v".into(), Value::Exact(bound))],
        notes,
    })
}

/// Enumerated designs satisfying the half-block (unequal or equal blocks)
/// or equal-block E-optimality conditions.
fn e_family_members(e: &Optimum) -> Result<Vec<ExactDesign>> {
    let mut out = Vec::new();
    for d in &e.optimizers {
        let mut member = verify_exact_e(d).satisfied;
        if !member && d.equal_block_size().is_some() {
            member = verify_equal_block_e(d)?.satisfied;
        }
        if member {
            out.push(d.clone());
        }
    }
    Ok(out)
}

fn certify_varcov(space: EnumerationSpace, opts: &CertifyOptions) -> Result<Certificate> {
    let e = brute_force_optimum(space.v, &space.m, Criterion::E, opts.budget)?;
    let vc = brute_force_optimum(space.v, &space.m, Criterion::VarCovSum, opts.budget)?;
    let nominated = e_family_members(&e)?;
    let vacuous = nominated.is_empty();
    let holds = nominated.iter().all(|d| vc.contains(d));
    let mut notes = vec![format!(
        "{} of {} E-optimal designs meet the half-block or equal-concurrence conditions",
        nominated.len(),
        e.optimizers.len()
    )];
    if vacuous {
        notes.push("no E-optimal design meets the conditions on this instance".into());
    }
    Ok(Certificate {
        claim: Claim::VarCovSumMin,
        space,
        optimum: vc.optimum.clone(),
        optimizers: exact_any(&vc.optimizers),
        nominated: exact_any(&nominated),
        holds,
        vacuous,
        values: vec![("varcov_min".into(), vc.optimum), ("lambda_min".into(), e.optimum)],
        notes,
    })
}

fn certify_a_r(space: EnumerationSpace, opts: &CertifyOptions) -> Result<Certificate> {
    if space.equal_block_size().is_none() {
        return Err(Error::UnequalBlockSizes);
    }
    let a = brute_force_optimum(space.v, &space.m, Criterion::A, opts.budget)?;
    let r = brute_force_optimum(space.v, &space.m, Criterion::R, opts.budget)?;
    let mut nominated = Vec::new();
    for d in &a.optimizers {
        if verify_btib(d, opts.variant)?.satisfied {
            nominated.push(d.clone());
        }
    }
    let vacuous = nominated.is_empty();
    let holds = nominated.iter().all(|d| r.contains(d));
    let mut notes = vec![format!("{} of {} A-optimal designs are BTIB designs with the optimal control total", nominated.len(), a.optimizers.len())];
    if vacuous {
        notes.push("no A-optimal design meets the BTIB conditions on this instance".into());
    }
    Ok(Certificate {
        claim: Claim::AOptIsROpt,
        space,
        optimum: r.optimum.clone(),
        optimizers: exact_any(&r.optimizers),
        nominated: exact_any(&nominated),
        holds,
        vacuous,
        values: vec![("A_optimum".into(), a.optimum), ("R_optimum".into(), r.optimum)],
        notes,
    })
}

fn certify_prop1(space: EnumerationSpace, opts: &CertifyOptions) -> Result<Certificate> {
    if space.equal_block_size().is_none() {
        return Err(Error::UnequalBlockSizes);
    }
    let e = brute_force_optimum(space.v, &space.m, Criterion::E, opts.budget)?;
    let vc = brute_force_optimum(space.v, &space.m, Criterion::VarCovSum, opts.budget)?;
    let mut nominated = Vec::new();
    for d in &enumerate_designs(space.v, &space.m, opts.budget)? {
        if verify_equal_block_e(&d)?.satisfied {
            nominated.push(d);
        }
    }
    let vacuous = nominated.is_empty();
    let holds = e.exact && nominated.iter().all(|d| e.contains(d));
    let varcov_ok = nominated.iter().all(|d| vc.contains(d));
    let notes = vec![format!(
        "{} designs meet the conditions; {} attain the smallest 1ᵀN⁻¹1",
        nominated.len(),
        if varcov_ok { "all" } else { "not all" }
    )];
    Ok(Certificate {
        claim: Claim::Prop1EOpt,
        space,
        optimum: e.optimum.clone(),
        optimizers: exact_any(&e.optimizers),
        nominated: exact_any(&nominated),
        holds,
        vacuous,
        values: vec![("lambda_min".into(), e.optimum), ("varcov_min".into(), vc.optimum)],
        notes,
    })
}

fn certify_e_c(space: EnumerationSpace, opts: &CertifyOptions) -> Result<Certificate> {
    let v = space.v;
    let c = average_contrast::<Rational>(v);
    let enumeration = enumerate_designs(v, &space.m, opts.budget)?;

    // (design, c-value, in the approximate E-optimal family)
    let mut pool: Vec<(AnyDesign, Rational, bool)> = Vec::new();
    let scored = enumeration.map_partitions(|designs| {
        designs
            .filter(|d| is_feasible(d).feasible)
            .map(|d| {
                let a = d.normalize();
                let value = c_value(&a, &c).expect("feasible design").value;
                let member = verify_approx_e(&a).satisfied;
                (AnyDesign::from(a), value.as_exact().expect("rational design").clone(), member)
            })
            .collect::<Vec<_>>()
    });
    pool.extend(scored.into_iter().flatten());

    let samples: Vec<ApproximateDesign<Rational>> = (0..opts.samples)
        .into_par_iter()
        .map(|i| DesignSampler::with_stream(opts.seed, i as u64).sample(v, space.d))
        .collect::<Result<_>>()?;
    for a in samples {
        let value = c_value(&a, &c)?.value;
        let member = verify_approx_e(&a).satisfied;
        pool.push((a.into(), value.as_exact().expect("rational design").clone(), member));
    }

    let n = rat_int(space.m.iter().sum());
    let s: Vec<Rational> = space.m.iter().map(|&mk| rat_int(mk) / n.clone()).collect();
    let product = e_opt_approx(v, &s, None)?;
    let value = c_value(&product, &c)?.value.as_exact().expect("rational design").clone();
    pool.push((product.into(), value, true));

    let min = pool.iter().map(|(_, x, _)| x.clone()).min().expect("non-empty pool");
    let nominated: Vec<&(AnyDesign, Rational, bool)> = pool.iter().filter(|p| p.2).collect();
    let holds = nominated.iter().all(|p| p.1 == min);
    let optimizers: Vec<&(AnyDesign, Rational, bool)> = pool.iter().filter(|p| p.1 == min).collect();
    let outside = optimizers.iter().filter(|p| !p.2).count();
    let notes = vec![
        format!(
            "compared {} normalized enumerated designs, {} random designs and the product design",
            pool.len() - opts.samples - 1,
            opts.samples
        ),
        format!("{} minimizers, {} outside the approximate E-optimal family", optimizers.len(), outside),
    ];
    Ok(Certificate {
        claim: Claim::EOptCOpt,
        space,
        optimum: Value::Exact(min.clone()),
        optimizers: optimizers.iter().map(|p| p.0.clone()).collect(),
        nominated: nominated.iter().map(|p| p.0.clone()).collect(),
        holds,
        vacuous: false,
        values: vec![
            ("c_min".into(), Value::Exact(min)),
            ("minimizers_outside_family".into(), Value::Exact(rat_int(outside as u64))),
        ],
        notes,
    })
}
