//! Optimality criteria on `N⁻¹(ξ)`.
//!
//! | criterion   | value                         | direction |
//! |-------------|-------------------------------|-----------|
//! | `A`         | `tr N⁻¹`                      | minimize  |
//! | `MV`        | `max_i (N⁻¹)_ii`              | minimize  |
//! | `E`         | `λ_max(N⁻¹) = 1/λ_min(N)`     | minimize  |
//! | `R`         | `Π_i (N⁻¹)_ii`                | minimize  |
//! | `PhiR`      | `(Π_i (N⁻¹)_ii)^(−1/v)`       | maximize  |
//! | `VarCovSum` | `1ᵀ N⁻¹ 1`                    | minimize  |
//! | `C`         | `cᵀ M⁻ c`                     | minimize  |
//!
//! Infeasible designs are valid inputs: they evaluate to
//! `feasible = false` with an infinite value and rank below every feasible
//! design.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::design::BlockDesign;
use crate::error::{Error, Result};
use crate::info::{
    contrast_info, full_info, generalized_inverse, inverse_info, is_estimable, is_feasible,
    lambda_min_value, InformationMatrix,
};
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Criterion {
    A,
    MV,
    E,
    R,
    PhiR,
    C,
    VarCovSum,
}

impl Criterion {
    pub const ALL: [Criterion; 7] =
        [Criterion::A, Criterion::MV, Criterion::E, Criterion::R, Criterion::PhiR, Criterion::C, Criterion::VarCovSum];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::A => "A",
            Criterion::MV => "MV",
            Criterion::E => "E",
            Criterion::R => "R",
            Criterion::PhiR => "PhiR",
            Criterion::C => "c",
            Criterion::VarCovSum => "VarCovSum",
        }
    }

    /// `PhiR` is the only criterion that is maximized.
    pub fn maximizes(self) -> bool {
        self == Criterion::PhiR
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "a" => Criterion::A,
            "mv" => Criterion::MV,
            "e" => Criterion::E,
            "r" => Criterion::R,
            "phir" | "phi_r" => Criterion::PhiR,
            "c" => Criterion::C,
            "varcov" | "varcovsum" => Criterion::VarCovSum,
            _ => return Err(Error::InvalidArgument(format!("unknown criterion `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionValue {
    pub criterion: Criterion,
    pub value: Value,
    pub feasible: bool,
}

impl CriterionValue {
    fn infeasible(criterion: Criterion) -> Self {
        Self { criterion, value: Value::infinite(), feasible: false }
    }
}

/// Scores a design. `Criterion::C` needs a contrast vector; use [`c_value`].
pub fn evaluate<D: BlockDesign>(design: &D, criterion: Criterion) -> Result<CriterionValue> {
    if criterion == Criterion::C {
        return Err(Error::InvalidArgument("the c criterion needs a contrast vector (see c_value)".into()));
    }
    if !is_feasible(design).feasible {
        return Ok(CriterionValue::infeasible(criterion));
    }
    let n = contrast_info(design)?;
    evaluate_info(&n, criterion)
}

/// Scores an information matrix directly.
pub fn evaluate_info<T: Scalar>(n: &InformationMatrix<T>, criterion: Criterion) -> Result<CriterionValue> {
    let value = match criterion {
        Criterion::E => match lambda_min_value(n) {
            Value::Exact(l) if !l.is_zero() => Value::Exact(l.recip()),
            Value::Exact(_) => return Ok(CriterionValue::infeasible(criterion)),
            Value::Real(l) if l > 0.0 => Value::Real(1.0 / l),
            Value::Real(_) => return Ok(CriterionValue::infeasible(criterion)),
        },
        Criterion::C => {
            return Err(Error::InvalidArgument("the c criterion needs a contrast vector (see c_value)".into()))
        }
        other => {
            let inv = match inverse_info(n) {
                Ok(inv) => inv,
                Err(Error::Singular) => return Ok(CriterionValue::infeasible(criterion)),
                Err(e) => return Err(e),
            };
            inverse_criterion(&inv, other)
        }
    };
    Ok(CriterionValue { criterion, value, feasible: true })
}

/// Criteria that are functions of `N⁻¹` alone.
pub(crate) fn inverse_criterion<T: Scalar>(inv: &Matrix<T>, criterion: Criterion) -> Value {
    let diag = inv.diagonal();
    match criterion {
        Criterion::A => Value::from_scalar(&inv.trace()),
        Criterion::MV => {
            let max = diag
                .iter()
                .cloned()
                .reduce(|a, b| if b > a { b } else { a })
                .expect("non-empty");
            Value::from_scalar(&max)
        }
        Criterion::VarCovSum => Value::from_scalar(&inv.total()),
        Criterion::R if T::EXACT => Value::from_scalar(&diag.iter().cloned().fold(T::one(), |a, b| a * b)),
        Criterion::R => Value::Real(log_diag_sum(&diag).exp()),
        Criterion::PhiR => Value::Real((-log_diag_sum(&diag) / diag.len() as f64).exp()),
        Criterion::E | Criterion::C => unreachable!("{criterion} is not a function of the inverse diagonal"),
    }
}

fn log_diag_sum<T: Scalar>(diag: &[T]) -> f64 {
    diag.iter().map(|x| x.to_f64().ln()).sum()
}

/// The contrast `c̃ = (−1, 1ᵀ/v)` comparing the average test treatment with the control.
pub fn average_contrast<T: Scalar>(v: usize) -> Vec<T> {
    let mut c = vec![T::ratio(1, v as i64); v + 1];
    c[0] = -T::one();
    c
}

/// `cᵀ M⁻ c` for a contrast vector `c` of length `v + 1`.
///
/// When `c` sums to zero and the design is feasible, `c = Q x` with
/// `x = c[1..]` and the value is `xᵀ N⁻¹ x`, exact for rational designs.
/// Otherwise the generalized inverse of `M` is used, after checking that `c`
/// is estimable.
pub fn c_value<D: BlockDesign>(design: &D, c: &[D::Elem]) -> Result<CriterionValue> {
    let t = design.num_treatments();
    if c.len() != t {
        return Err(Error::InvalidArgument(format!("contrast has {} entries, expected {t}", c.len())));
    }
    if c.iter().all(Zero::is_zero) {
        return Ok(CriterionValue { criterion: Criterion::C, value: Value::from_scalar(&D::Elem::zero()), feasible: true });
    }
    let sum = c.iter().cloned().fold(D::Elem::zero(), |a, b| a + b);
    let scale = c.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
    if sum.is_negligible(scale) && is_feasible(design).feasible {
        let n = contrast_info(design)?;
        let inv = inverse_info(&n)?;
        let value = inv.quadratic_form(&c[1..]);
        return Ok(CriterionValue { criterion: Criterion::C, value: Value::from_scalar(&value), feasible: true });
    }
    let m = full_info(design)?.to_f64();
    let pinv = generalized_inverse(&m);
    let cf: Vec<f64> = c.iter().map(Scalar::to_f64).collect();
    if !is_estimable(&m, &pinv, &cf) {
        return Err(Error::NonEstimable);
    }
    Ok(CriterionValue { criterion: Criterion::C, value: Value::Real(pinv.quadratic_form(&cf)), feasible: true })
}

/// Best-first ordering: `Less` means `a` is the better design.
pub fn is_better(a: &CriterionValue, b: &CriterionValue) -> Result<Ordering> {
    if a.criterion != b.criterion {
        return Err(Error::CriterionMismatch(a.criterion.to_string(), b.criterion.to_string()));
    }
    Ok(match (a.feasible, b.feasible) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => Ordering::Equal,
        (true, true) if a.criterion.maximizes() => b.value.compare(&a.value),
        (true, true) => a.value.compare(&b.value),
    })
}

/// `1/(4v)`, the largest attainable `λ_min(N)` over approximate designs.
pub fn e_opt_bound(v: usize) -> Rational {
    Rational::ratio(1, 4 * v as i64)
}
