//! Optimal design families and their membership conditions.
//!
//! * [`Family::ApproxE`]: approximate designs with half of every block on
//!   the control and every test treatment replicated `1/(2v)`. These are
//!   exactly the E-optimal approximate designs, with `λ_min(N) = 1/(4v)`.
//! * [`Family::ExactE`]: exact designs with `ξ(0,k) = m_k/2` that are
//!   equireplicated in the test treatments (block sizes may differ).
//! * [`Family::EqualBlockE`]: equal block size `q`, control count `q/2`
//!   per block (`⌊q/2⌋` or `⌊q/2⌋+1` for odd `q`) and equal control-test
//!   concurrences `μ_0i`.
//! * [`Family::Btib`]: A-optimal BTIB designs, binary in the test
//!   treatments with the control total `R` from
//!   [`optimal_control_replication`] spread as evenly as possible.

mod btib;
mod search;

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value as Json};

pub use btib::{g_func, h_func, h_value, optimal_control_replication, ControlReplication, GhVariant};
pub use search::{search_exact, SearchTarget};

use crate::design::{check_weights, product_design, AnyDesign, ApproximateDesign, BlockDesign, ExactDesign};
use crate::error::{Error, Result};
use crate::scalar::{Scalar, CHECK_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    ApproxE,
    ExactE,
    EqualBlockE,
    Btib,
}

impl Family {
    /// Token used on the command line and in reports.
    pub fn token(self) -> &'static str {
        match self {
            Family::ApproxE => "thm1",
            Family::ExactE => "thm3",
            Family::EqualBlockE => "prop1",
            Family::Btib => "thm5",
        }
    }

    pub fn needs_exact(self) -> bool {
        self != Family::ApproxE
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "thm1" | "approx-e" => Family::ApproxE,
            "thm3" | "exact-e" => Family::ExactE,
            "prop1" | "equal-block-e" => Family::EqualBlockE,
            "thm5" | "btib" => Family::Btib,
            _ => return Err(Error::InvalidArgument(format!("unknown design family `{s}`"))),
        })
    }
}

/// Named condition names used in reports.
pub mod condition {
    pub const CONTROL_HALF_BLOCK: &str = "control_half_block";
    pub const EQUIREPLICATED_TESTS: &str = "equireplicated_tests";
    pub const BINARY_TESTS: &str = "binary_tests";
    pub const BTIB_BALANCE: &str = "btib_balance";
    pub const CONTROL_ROW_FLOOR: &str = "control_row_floor";
    pub const CONTROL_TOTAL_R: &str = "control_total_R";
    pub const EQUAL_CONTROL_CONCURRENCE: &str = "equal_control_concurrence";
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub family: Family,
    pub satisfied: bool,
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    fn new(family: Family, checks: Vec<ConditionCheck>) -> Self {
        Self { family, satisfied: checks.iter().all(|c| c.holds), checks }
    }

    pub fn violations(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }

    pub fn to_json(&self) -> Json {
        json!({
            "family": self.family.token(),
            "satisfied": self.satisfied,
            "conditions": self.checks.iter().map(|c| json!({
                "name": c.name,
                "holds": c.holds,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

fn check(name: &'static str, failures: Vec<String>, ok: &str) -> ConditionCheck {
    ConditionCheck {
        name,
        holds: failures.is_empty(),
        detail: if failures.is_empty() { ok.to_string() } else { failures.join("; ") },
    }
}

/// Approximate E-optimal design with half of each block on the control.
///
/// Without `tests` this is the product design `r* ⊗ s` with
/// `r* = (1/2, 1/(2v), …, 1/(2v))`. With `tests`, the `v × d` table is used
/// as the test rows after checking that every row sums to `1/(2v)` and
/// every column to `s_k/2`.
pub fn e_opt_approx<T: Scalar>(v: usize, s: &[T], tests: Option<Vec<Vec<T>>>) -> Result<ApproximateDesign<T>> {
    if v == 0 {
        return Err(Error::InvalidArgument("need at least one test treatment".into()));
    }
    check_weights("s", s, true)?;
    let half = T::ratio(1, 2);
    let Some(tests) = tests else {
        let mut r = vec![T::ratio(1, 2 * v as i64); v + 1];
        r[0] = half;
        return product_design(&r, s);
    };
    let d = s.len();
    if tests.len() != v || tests.iter().any(|row| row.len() != d) {
        return Err(Error::InvalidArgument(format!("test allocation must be {v} × {d}")));
    }
    let mut problems = Vec::new();
    if tests.iter().flatten().any(|x| x.lt_zero()) {
        problems.push("nonnegativity".to_string());
    }
    let target = T::ratio(1, 2 * v as i64);
    for (i, row) in tests.iter().enumerate() {
        let sum = row.iter().cloned().fold(T::zero(), |a, b| a + b);
        if !sum.approx_eq(&target, CHECK_TOL) {
            problems.push(format!("row sum of test {} ({:?} ≠ 1/(2v))", i + 1, sum));
        }
    }
    for (k, sk) in s.iter().enumerate() {
        let sum = tests.iter().fold(T::zero(), |a, row| a + row[k].clone());
        if !sum.approx_eq(&(sk.clone() * half.clone()), CHECK_TOL) {
            problems.push(format!("column sum of block {} ({:?} ≠ s_k/2)", k + 1, sum));
        }
    }
    if !problems.is_empty() {
        return Err(Error::ConstraintViolation(problems.join(", ")));
    }
    let mut rows = Vec::with_capacity(v + 1);
    rows.push(s.iter().map(|x| x.clone() * half.clone()).collect());
    rows.extend(tests);
    ApproximateDesign::new(rows)
}

/// A-optimal treatment proportions `r*_0 = 1/(√v+1)`, `r*_i = 1/(√v(√v+1))`.
pub fn a_opt_proportions(v: usize) -> Vec<f64> {
    let root = (v as f64).sqrt();
    let mut r = vec![1.0 / (root * (root + 1.0)); v + 1];
    r[0] = 1.0 / (root + 1.0);
    r
}

/// A-optimal approximate design `r* ⊗ s`.
pub fn a_opt_approx(v: usize, s: &[f64]) -> Result<ApproximateDesign<f64>> {
    if v == 0 {
        return Err(Error::InvalidArgument("need at least one test treatment".into()));
    }
    product_design(&a_opt_proportions(v), s)
}

/// Exact E-optimal design for block sizes `m`: half of every block on the
/// control, remaining slots filled round-robin over the test treatments in
/// block order.
pub fn e_opt_exact(v: usize, m: &[u64]) -> Result<ExactDesign> {
    if v == 0 {
        return Err(Error::InvalidArgument("need at least one test treatment".into()));
    }
    if let Some(k) = m.iter().position(|&x| x % 2 == 1) {
        return Err(Error::EmptyFamily {
            family: "exact E-optimal",
            reason: format!("block {} has odd size {}", k + 1, m[k]),
        });
    }
    let half: u64 = m.iter().sum::<u64>() / 2;
    if half % v as u64 != 0 {
        return Err(Error::EmptyFamily {
            family: "exact E-optimal",
            reason: format!("{half} test slots cannot be split evenly over {v} test treatments"),
        });
    }
    let d = m.len();
    let mut rows = vec![vec![0u64; d]; v + 1];
    let mut next = 0usize;
    for (k, &mk) in m.iter().enumerate() {
        rows[0][k] = mk / 2;
        for _ in 0..mk / 2 {
            rows[1 + next % v][k] += 1;
            next += 1;
        }
    }
    ExactDesign::new(m.to_vec(), rows)
}

/// Checks a design against the conditions of `family`.
pub fn verify_conditions(design: &AnyDesign, family: Family, variant: GhVariant) -> Result<ConditionReport> {
    match (design, family) {
        (AnyDesign::Rational(a), Family::ApproxE) => Ok(verify_approx_e(a)),
        (AnyDesign::Real(a), Family::ApproxE) => Ok(verify_approx_e(a)),
        (AnyDesign::Exact(x), Family::ExactE) => Ok(verify_exact_e(x)),
        (AnyDesign::Exact(x), Family::EqualBlockE) => verify_equal_block_e(x),
        (AnyDesign::Exact(x), Family::Btib) => verify_btib(x, variant),
        (_, f) => Err(Error::FamilyMismatch {
            family: f.token(),
            expected: if f.needs_exact() { "exact" } else { "approximate" },
        }),
    }
}

pub fn verify_approx_e<T: Scalar>(design: &ApproximateDesign<T>) -> ConditionReport {
    let v = design.v();
    let half = T::ratio(1, 2);
    let s = design.block_totals();
    let control: Vec<String> = (0..design.d())
        .filter(|&k| !design.get(0, k).approx_eq(&(s[k].clone() * half.clone()), CHECK_TOL))
        .map(|k| format!("block {}: control {:?} ≠ s_k/2", k + 1, design.get(0, k)))
        .collect();
    let target = T::ratio(1, 2 * v as i64);
    let r = design.replications();
    let reps: Vec<String> = (1..=v)
        .filter(|&i| !r[i].approx_eq(&target, CHECK_TOL))
        .map(|i| format!("test {i}: r = {:?} ≠ 1/(2v)", r[i]))
        .collect();
    ConditionReport::new(
        Family::ApproxE,
        vec![
            check(condition::CONTROL_HALF_BLOCK, control, "control holds half of every block"),
            check(condition::EQUIREPLICATED_TESTS, reps, "every test replicated 1/(2v)"),
        ],
    )
}

fn equireplicated(design: &ExactDesign) -> Vec<String> {
    let r = design.integer_replications();
    if r[1..].iter().all(|&x| x == r[1]) {
        Vec::new()
    } else {
        vec![format!("test replications {:?} differ", &r[1..])]
    }
}

pub fn verify_exact_e(design: &ExactDesign) -> ConditionReport {
    let control: Vec<String> = design
        .block_sizes()
        .iter()
        .enumerate()
        .filter(|&(k, &mk)| 2 * design.get(0, k) != mk)
        .map(|(k, &mk)| format!("block {}: control {} ≠ {}/2", k + 1, design.get(0, k), mk))
        .collect();
    ConditionReport::new(
        Family::ExactE,
        vec![
            check(condition::CONTROL_HALF_BLOCK, control, "control holds half of every block"),
            check(condition::EQUIREPLICATED_TESTS, equireplicated(design), "test treatments equireplicated"),
        ],
    )
}

pub fn verify_equal_block_e(design: &ExactDesign) -> Result<ConditionReport> {
    let q = design.equal_block_size().ok_or(Error::UnequalBlockSizes)?;
    let allowed: &[u64] = if q % 2 == 0 { &[q / 2] } else { &[q / 2, q / 2 + 1] };
    let control: Vec<String> = (0..design.d())
        .filter(|&k| !allowed.contains(&design.get(0, k)))
        .map(|k| format!("block {}: control {} not in {:?}", k + 1, design.get(0, k), allowed))
        .collect();
    let mu: Vec<u64> = (1..=design.v()).map(|i| design.integer_concurrence(0, i)).collect();
    let conc = if mu.iter().all(|&x| x == mu[0]) {
        Vec::new()
    } else {
        vec![format!("control concurrences {mu:?} differ")]
    };
    Ok(ConditionReport::new(
        Family::EqualBlockE,
        vec![
            check(condition::CONTROL_ROW_FLOOR, control, "control count q/2 (rounded) in every block"),
            check(condition::EQUAL_CONTROL_CONCURRENCE, conc, "μ_0i equal for all tests"),
        ],
    ))
}

pub fn verify_btib(design: &ExactDesign, variant: GhVariant) -> Result<ConditionReport> {
    let q = design.equal_block_size().ok_or(Error::UnequalBlockSizes)?;
    let (v, d) = (design.v(), design.d());

    let binary: Vec<String> = (1..=v)
        .flat_map(|i| (0..d).map(move |k| (i, k)))
        .filter(|&(i, k)| design.get(i, k) > 1)
        .map(|(i, k)| format!("test {i} appears {} times in block {}", design.get(i, k), k + 1))
        .collect();

    let total: u64 = design.row(0).iter().sum();
    let (total_check, floor_check) = match optimal_control_replication(d as u64, q, v as u64, variant) {
        Ok(rep) => {
            let r = rep.r;
            let total_fail = if total == r {
                Vec::new()
            } else {
                vec![format!("control total {total} ≠ R = {r}")]
            };
            let lo = r / d as u64;
            let floor_fail = (0..d)
                .filter(|&k| design.get(0, k) != lo && design.get(0, k) != lo + 1)
                .map(|k| format!("block {}: control {} not in {{{lo}, {}}}", k + 1, design.get(0, k), lo + 1))
                .collect();
            (check(condition::CONTROL_TOTAL_R, total_fail, &format!("control total equals R = {r}")),
             check(condition::CONTROL_ROW_FLOOR, floor_fail, "control spread as ⌊R/d⌋ or ⌊R/d⌋+1"))
        }
        Err(e) => (
            check(condition::CONTROL_TOTAL_R, vec![e.to_string()], ""),
            check(condition::CONTROL_ROW_FLOOR, vec!["R undefined".into()], ""),
        ),
    };

    let mu0: Vec<u64> = (1..=v).map(|i| design.integer_concurrence(0, i)).collect();
    let mut balance = Vec::new();
    if !mu0.iter().all(|&x| x == mu0[0]) {
        balance.push(format!("control concurrences {mu0:?} differ"));
    }
    let pairs: Vec<u64> = (1..=v)
        .flat_map(|i| (i + 1..=v).map(move |j| (i, j)))
        .map(|(i, j)| design.integer_concurrence(i, j))
        .collect();
    if !pairs.iter().all(|&x| x == pairs[0]) {
        balance.push(format!("test concurrences {pairs:?} differ"));
    }

    Ok(ConditionReport::new(
        Family::Btib,
        vec![
            check(condition::BINARY_TESTS, binary, "binary in test treatments"),
            total_check,
            floor_check,
            check(condition::BTIB_BALANCE, balance, "all μ_0i equal and all μ_ij equal"),
        ],
    ))
}
