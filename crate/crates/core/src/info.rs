//! Information matrices for treatment-control contrasts.
//!
//! `M(ξ) = diag(r) − X diag(s⁻¹) Xᵀ` is the full `(v+1) × (v+1)` matrix for
//! all pairwise comparisons; the contrast matrix `N(ξ)` is `M` with the
//! control row and column deleted:
//!
//! ```text
//! N(ξ) = diag(r_1, …, r_v) − Z diag(s⁻¹) Zᵀ
//! ```
//!
//! where `Z` holds the test rows of the allocation table. Both are built in
//! the design's own scalar type, so rational designs give exact matrices.

use std::cmp::Ordering;

use nalgebra::SymmetricEigen;
use num_traits::Zero;
use serde_json::Value as Json;

use crate::design::{BlockDesign, ExactDesign};
use crate::error::{Error, Result};
use crate::matrix::{Definiteness, Matrix};
use crate::scalar::{rat_int, rational_candidates, Rational, Scalar, Value};

/// Relative cutoff below which eigenvalues count as zero in [`generalized_inverse`].
pub const PINV_RELATIVE_CUTOFF: f64 = 1e-10;

/// Residual bound for the estimability test `‖(I − M M⁻) c‖`.
pub const ESTIMABILITY_TOL: f64 = 1e-8;

/// Symmetric `v × v` information matrix `N(ξ)` for the contrasts `τ_i − τ_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationMatrix<T>(Matrix<T>);

impl<T: Scalar> InformationMatrix<T> {
    /// Wraps a square matrix, rejecting asymmetric input.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if !m.is_symmetric(1e-12 * m.max_abs().max(1.0)) {
            return Err(Error::InvalidArgument("information matrix must be symmetric".into()));
        }
        Ok(Self(m))
    }

    pub fn order(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    /// Completely symmetric matrix `αI + βJ` with the same trace and the
    /// same off-diagonal total: the average of `P N Pᵀ` over all test
    /// permutations `P`.
    pub fn symmetrized(&self) -> Self {
        let v = self.order();
        let vt = T::from_int(v as i64);
        let trace = self.0.trace();
        let diag = trace.clone() / vt.clone();
        let off = if v > 1 {
            (self.0.total() - trace) / (vt.clone() * (vt - T::one()))
        } else {
            T::zero()
        };
        Self(Matrix::from_fn(v, v, |i, j| if i == j { diag.clone() } else { off.clone() }))
    }

    pub fn to_json(&self) -> Json {
        self.0.to_json()
    }
}

/// `M(ξ) = diag(r) − X diag(s⁻¹) Xᵀ`.
pub fn full_info<D: BlockDesign>(design: &D) -> Result<Matrix<D::Elem>> {
    let s = positive_block_totals(design)?;
    let r = design.replications();
    let t = design.num_treatments();
    Ok(Matrix::from_fn(t, t, |i, j| {
        let mut x = if i == j { r[i].clone() } else { D::Elem::zero() };
        for (k, sk) in s.iter().enumerate() {
            if design.occupies(i, k) && design.occupies(j, k) {
                x = x - design.weight(i, k) * design.weight(j, k) / sk.clone();
            }
        }
        x
    }))
}

/// `N(ξ) = diag(r_1, …, r_v) − Z diag(s⁻¹) Zᵀ`, built directly from the
/// test rows.
pub fn contrast_info<D: BlockDesign>(design: &D) -> Result<InformationMatrix<D::Elem>> {
    let s = positive_block_totals(design)?;
    let r = design.replications();
    let v = design.num_tests();
    Ok(InformationMatrix(Matrix::from_fn(v, v, |a, b| {
        let (i, j) = (a + 1, b + 1);
        let mut x = if i == j { r[i].clone() } else { D::Elem::zero() };
        for (k, sk) in s.iter().enumerate() {
            if design.occupies(i, k) && design.occupies(j, k) {
                x = x - design.weight(i, k) * design.weight(j, k) / sk.clone();
            }
        }
        x
    })))
}

fn positive_block_totals<D: BlockDesign>(design: &D) -> Result<Vec<D::Elem>> {
    let s = design.block_totals();
    match s.iter().position(|x| !x.gt_zero()) {
        Some(k) => Err(Error::ZeroBlockSize { block: k }),
        None => Ok(s),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Connected,
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub reason: Connectivity,
    /// Treatments not reachable from the control in the incidence graph.
    pub unreachable: Vec<usize>,
}

/// Feasibility through connectivity of the treatment-block incidence graph.
pub fn is_feasible<D: BlockDesign>(design: &D) -> FeasibilityReport {
    let t = design.num_treatments();
    let d = design.num_blocks();
    let mut treatment_seen = vec![false; t];
    let mut block_seen = vec![false; d];
    let mut stack = vec![0usize];
    treatment_seen[0] = true;
    while let Some(i) = stack.pop() {
        for k in 0..d {
            if block_seen[k] || !design.occupies(i, k) {
                continue;
            }
            block_seen[k] = true;
            for j in 0..t {
                if !treatment_seen[j] && design.occupies(j, k) {
                    treatment_seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    let unreachable: Vec<usize> = (0..t).filter(|&i| !treatment_seen[i]).collect();
    let feasible = unreachable.is_empty();
    FeasibilityReport {
        feasible,
        reason: if feasible { Connectivity::Connected } else { Connectivity::Disconnected },
        unreachable,
    }
}

/// Extreme eigenvalues of `N` and a unit eigenvector for the smallest one.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Unit length; its largest-magnitude entry is positive.
    pub min_eigenvector: Vec<f64>,
}

pub fn spectrum<T: Scalar>(n: &InformationMatrix<T>) -> Spectrum {
    let eig = SymmetricEigen::new(n.0.to_nalgebra());
    let (imin, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty matrix");
    let lambda_max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut x: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let lead = x
        .iter()
        .copied()
        .fold(0.0f64, |best, a| if a.abs() > best.abs() + 1e-12 { a } else { best });
    let sign = if lead < 0.0 { -1.0 } else { 1.0 };
    for a in &mut x {
        *a *= sign / norm;
    }
    Spectrum { lambda_min: eig.eigenvalues[imin], lambda_max, min_eigenvector: x }
}

/// `N⁻¹`; exact for rational matrices.
pub fn inverse_info<T: Scalar>(n: &InformationMatrix<T>) -> Result<Matrix<T>> {
    n.0.inverse().ok_or(Error::Singular)
}

/// Permutation-averaged information matrix `N̄` of an equal-block design.
pub fn symmetrized_info(design: &ExactDesign) -> Result<InformationMatrix<Rational>> {
    if design.equal_block_size().is_none() {
        return Err(Error::UnequalBlockSizes);
    }
    Ok(contrast_info(design)?.symmetrized())
}

/// Smallest eigenvalue of `N̄`, `Σ_i μ_0i / (q v)`.
pub fn symmetrized_lambda_min(design: &ExactDesign) -> Result<Rational> {
    let q = design.equal_block_size().ok_or(Error::UnequalBlockSizes)?;
    let total: u64 = (1..=design.v()).map(|i| design.integer_concurrence(0, i)).sum();
    Ok(rat_int(total) / rat_int(q * design.v() as u64))
}

/// Compares `λ_min(N)` with `t` through the definiteness of `N − tI`:
/// positive definite means `λ_min > t`, singular semidefinite means equality.
/// Exact for rationals.
pub fn compare_lambda_min<T: Scalar>(n: &InformationMatrix<T>, t: &T) -> Ordering {
    let v = n.order();
    let shifted = Matrix::from_fn(v, v, |i, j| {
        let x = n.0[(i, j)].clone();
        if i == j { x - t.clone() } else { x }
    });
    match shifted.definiteness() {
        Definiteness::PositiveDefinite => Ordering::Greater,
        Definiteness::PositiveSemidefinite => Ordering::Equal,
        Definiteness::Indefinite => Ordering::Less,
    }
}

/// `λ_min(N)`, as an exact rational when `N` is rational and its smallest
/// eigenvalue is a rational number with a moderate denominator; the
/// floating-point value otherwise.
pub fn lambda_min_value<T: Scalar>(n: &InformationMatrix<T>) -> Value {
    let approx = spectrum(n).lambda_min;
    if !T::EXACT {
        return Value::Real(approx);
    }
    let exact = InformationMatrix(n.0.map(|x| x.to_rational().expect("exact scalar")));
    match recognize_lambda_min(&exact, approx) {
        Some(r) => Value::Exact(r),
        None => Value::Real(approx),
    }
}

/// Searches continued-fraction convergents of `approx` for the exact
/// smallest eigenvalue and certifies it with [`compare_lambda_min`].
pub fn recognize_lambda_min(n: &InformationMatrix<Rational>, approx: f64) -> Option<Rational> {
    let scale = approx.abs().max(1.0);
    rational_candidates(approx, 1_000_000_000_000)
        .into_iter()
        .rev()
        .filter(|c| (c.to_f64() - approx).abs() <= 1e-6 * scale)
        .find(|c| compare_lambda_min(n, c) == Ordering::Equal)
}

/// Moore-Penrose inverse of a symmetric matrix via its eigendecomposition;
/// eigenvalues below `PINV_RELATIVE_CUTOFF · λ_max` are dropped.
pub fn generalized_inverse(m: &Matrix<f64>) -> Matrix<f64> {
    let eig = SymmetricEigen::new(m.to_nalgebra());
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let cutoff = PINV_RELATIVE_CUTOFF * lmax;
    let n = m.rows();
    Matrix::from_fn(n, n, |i, j| {
        (0..n)
            .filter(|&k| eig.eigenvalues[k].abs() > cutoff)
            .map(|k| eig.eigenvectors[(i, k)] * eig.eigenvectors[(j, k)] / eig.eigenvalues[k])
            .sum()
    })
}

/// Whether `c` lies in the column space of `m`, judged by the residual
/// `‖(I − m m⁻) c‖ ≤ ESTIMABILITY_TOL`.
pub fn is_estimable(m: &Matrix<f64>, pinv: &Matrix<f64>, c: &[f64]) -> bool {
    let projected = m.mul(pinv).mul_vec(c);
    let residual: f64 = c.iter().zip(&projected).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    residual <= ESTIMABILITY_TOL
}

/// `N · 1_v`, used for exact eigenvector identities.
pub fn apply_to_ones<T: Scalar>(n: &InformationMatrix<T>) -> Vec<T> {
    n.0.mul_vec(&vec![T::one(); n.order()])
}

/// Whether every entry of `m` is nonnegative (exactly, for rationals).
pub fn is_entrywise_nonnegative<T: Scalar>(m: &Matrix<T>) -> bool {
    (0..m.rows()).all(|i| m.row(i).iter().all(|x| !x.lt_zero()))
}
