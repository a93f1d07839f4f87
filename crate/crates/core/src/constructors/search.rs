//! Backtracking search for exact designs in a family.
//!
//! Columns are filled left to right; each column runs through its
//! compositions in colexicographic order, restricted to the column shapes the
//! family allows. Designs are therefore visited in the same canonical order
//! as [`crate::oracle::enumerate_designs`], and the first success is the
//! smallest one in that order. The root-level choices are searched in
//! parallel and the earliest success by root index wins.

use rayon::prelude::*;

use super::{optimal_control_replication, verify_conditions, Family, GhVariant};
use crate::criteria::{evaluate, Criterion};
use crate::design::{AnyDesign, ExactDesign};
use crate::error::{Error, Result};
use crate::oracle::compositions;
use crate::scalar::Value;

/// What a design must satisfy to be returned by [`search_exact`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchTarget {
    pub family: Family,
    /// Optional criterion value the design must attain exactly.
    pub criterion: Option<(Criterion, Value)>,
    pub variant: GhVariant,
}

impl SearchTarget {
    pub fn family(family: Family) -> Self {
        Self { family, criterion: None, variant: GhVariant::default() }
    }

    fn accepts(&self, design: &ExactDesign) -> Result<bool> {
        let report = verify_conditions(&AnyDesign::Exact(design.clone()), self.family, self.variant)?;
        if !report.satisfied {
            return Ok(false);
        }
        match &self.criterion {
            None => Ok(true),
            Some((c, target)) => {
                let got = evaluate(design, *c)?;
                Ok(got.feasible && got.value.compare(target).is_eq())
            }
        }
    }
}

/// Row-sum caps used for pruning.
struct Limits {
    /// Largest allowed replication of each test treatment.
    test_cap: Option<u64>,
    /// Largest allowed control total.
    control_cap: Option<u64>,
}

/// First design of `D(v, d, m)` in canonical order meeting `target`, or
/// `None` if the family is empty on this instance.
///
/// Fails with [`Error::BudgetExceeded`] when the product of per-column
/// candidate counts exceeds `budget`.
pub fn search_exact(v: usize, m: &[u64], target: &SearchTarget, budget: u128) -> Result<Option<ExactDesign>> {
    if v == 0 || m.is_empty() {
        return Err(Error::InvalidArgument("need v ≥ 1 and at least one block".into()));
    }
    if let Some(k) = m.iter().position(|&x| x == 0) {
        return Err(Error::ZeroBlockSize { block: k });
    }
    if target.family == Family::ApproxE {
        return Err(Error::FamilyMismatch { family: target.family.token(), expected: "approximate" });
    }
    if matches!(target.criterion, Some((Criterion::C, _))) {
        return Err(Error::InvalidArgument("search targets cannot use the c criterion".into()));
    }
    let d = m.len();
    let n: u64 = m.iter().sum();

    let mut limits = Limits { test_cap: None, control_cap: None };
    let mut control_range: Option<(u64, u64)> = None;
    match target.family {
        Family::ExactE => {
            if m.iter().any(|x| x % 2 == 1) || (n / 2) % v as u64 != 0 {
                return Ok(None);
            }
            limits.test_cap = Some(n / 2 / v as u64);
        }
        Family::EqualBlockE | Family::Btib => {
            let q = m[0];
            if m.iter().any(|&x| x != q) {
                return Err(Error::UnequalBlockSizes);
            }
            if target.family == Family::Btib {
                let rep = match optimal_control_replication(d as u64, q, v as u64, target.variant) {
                    Ok(rep) => rep,
                    Err(Error::EmptyRange { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                };
                let lo = rep.r / d as u64;
                control_range = Some((lo, lo + 1));
                limits.control_cap = Some(rep.r);
            } else {
                control_range = Some((q / 2, q / 2 + q % 2));
            }
        }
        Family::ApproxE => unreachable!(),
    }

    let candidates: Vec<Vec<Vec<u64>>> = m
        .iter()
        .map(|&mk| {
            compositions(mk, v + 1)
                .into_iter()
                .filter(|col| match target.family {
                    Family::ExactE => 2 * col[0] == mk,
                    Family::EqualBlockE => {
                        let (lo, hi) = control_range.unwrap();
                        (lo..=hi).contains(&col[0])
                    }
                    Family::Btib => {
                        let (lo, hi) = control_range.unwrap();
                        (lo..=hi).contains(&col[0]) && col[1..].iter().all(|&x| x <= 1)
                    }
                    Family::ApproxE => unreachable!(),
                })
                .collect()
        })
        .collect();

    let count = candidates.iter().fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
    if count > budget {
        return Err(Error::BudgetExceeded { count, budget });
    }
    if count == 0 {
        return Ok(None);
    }

    let found = candidates[0]
        .par_iter()
        .map(|first| {
            let mut state = State::new(v, m, &limits);
            if !state.push(first) {
                return Ok(None);
            }
            state.descend(1, &candidates, target)
        })
        .find_map_first(|res: Result<Option<ExactDesign>>| match res {
            Ok(None) => None,
            other => Some(other),
        });
    found.unwrap_or(Ok(None))
}

struct State<'a> {
    v: usize,
    m: &'a [u64],
    limits: &'a Limits,
    rows: Vec<u64>,
    columns: Vec<&'a [u64]>,
}

impl<'a> State<'a> {
    fn new(v: usize, m: &'a [u64], limits: &'a Limits) -> Self {
        Self { v, m, limits, rows: vec![0; v + 1], columns: Vec::with_capacity(m.len()) }
    }

    /// Adds a column; returns `false` (leaving the state unchanged) if a cap
    /// would be exceeded.
    fn push(&mut self, col: &'a [u64]) -> bool {
        if let Some(cap) = self.limits.control_cap {
            if self.rows[0] + col[0] > cap {
                return false;
            }
        }
        if let Some(cap) = self.limits.test_cap {
            if (1..=self.v).any(|i| self.rows[i] + col[i] > cap) {
                return false;
            }
        }
        for (r, x) in self.rows.iter_mut().zip(col) {
            *r += x;
        }
        self.columns.push(col);
        true
    }

    fn pop(&mut self) {
        let col = self.columns.pop().expect("non-empty");
        for (r, x) in self.rows.iter_mut().zip(col) {
            *r -= x;
        }
    }

    fn descend(&mut self, k: usize, candidates: &'a [Vec<Vec<u64>>], target: &SearchTarget) -> Result<Option<ExactDesign>> {
        if k == candidates.len() {
            let design = ExactDesign::from_columns_unchecked(self.v, self.m, &self.columns);
            return Ok(target.accepts(&design)?.then_some(design));
        }
        for col in &candidates[k] {
            if !self.push(col) {
                continue;
            }
            let found = self.descend(k + 1, candidates, target)?;
            self.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}
