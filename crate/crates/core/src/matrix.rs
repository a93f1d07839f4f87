//! Small dense matrices over [`Scalar`].
//!
//! Only what the information-matrix code needs: products, Gauss-Jordan
//! inversion, an exact definiteness test and a bridge to `nalgebra` for
//! symmetric eigendecompositions.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use serde_json::Value as Json;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Outcome of [`Matrix::definiteness`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definiteness {
    PositiveDefinite,
    /// Positive semidefinite and singular.
    PositiveSemidefinite,
    Indefinite,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| acc + self[(i, k)].clone() * other[(k, j)].clone())
        })
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[T]) -> T {
        self.mul_vec(x)
            .into_iter()
            .zip(x)
            .fold(T::zero(), |acc, (a, b)| acc + a * b.clone())
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    /// Sum of every entry, `1ᵀ A 1`.
    pub fn total(&self) -> T {
        self.data.iter().cloned().fold(T::zero(), |acc, x| acc + x)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)].approx_eq(&self[(j, i)], tol)))
    }

    /// Submatrix with row and column `k` removed.
    pub fn without(&self, k: usize) -> Self {
        let keep: Vec<usize> = (0..self.rows).filter(|&i| i != k).collect();
        let keep_c: Vec<usize> = (0..self.cols).filter(|&j| j != k).collect();
        Self::from_fn(keep.len(), keep_c.len(), |i, j| self[(keep[i], keep_c[j])].clone())
    }

    /// Gauss-Jordan inverse with largest-magnitude pivoting. Returns `None`
    /// when a pivot vanishes (exactly for rationals, relative to the matrix
    /// scale for floats).
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let scale = self.max_abs();
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n).max_by(|&i, &j| {
                a[(i, col)]
                    .abs()
                    .partial_cmp(&a[(j, col)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
            if a[(pivot, col)].is_negligible(scale) {
                return None;
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = a[(col, j)].clone() / p.clone();
                inv[(col, j)] = inv[(col, j)].clone() / p.clone();
            }
            for i in 0..n {
                if i == col || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in 0..n {
                    let t = a[(col, j)].clone() * f.clone();
                    a[(i, j)] = a[(i, j)].clone() - t;
                    let t = inv[(col, j)].clone() * f.clone();
                    inv[(i, j)] = inv[(i, j)].clone() - t;
                }
            }
        }
        Some(inv)
    }

    /// Classifies a symmetric matrix by symmetric Gaussian elimination with
    /// diagonal pivoting. Exact for rationals.
    pub fn definiteness(&self) -> Definiteness {
        assert!(self.is_square(), "definiteness of a non-square matrix");
        let scale = self.max_abs();
        let mut a = self.clone();
        let mut alive: Vec<usize> = (0..self.rows).collect();
        while !alive.is_empty() {
            if alive.iter().any(|&i| a[(i, i)].lt_zero() && !a[(i, i)].is_negligible(scale)) {
                return Definiteness::Indefinite;
            }
            let (pos, &p) = alive
                .iter()
                .enumerate()
                .max_by(|(_, &i), (_, &j)| {
                    a[(i, i)].partial_cmp(&a[(j, j)]).unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("non-empty");
            if a[(p, p)].is_negligible(scale) {
                // Zero diagonal: every remaining entry must vanish.
                let all_zero = alive
                    .iter()
                    .all(|&i| alive.iter().all(|&j| a[(i, j)].is_negligible(scale)));
                return if all_zero {
                    Definiteness::PositiveSemidefinite
                } else {
                    Definiteness::Indefinite
                };
            }
            alive.remove(pos);
            let pivot = a[(p, p)].clone();
            for &i in &alive {
                let f = a[(i, p)].clone() / pivot.clone();
                if f.is_zero() {
                    continue;
                }
                for &j in &alive {
                    let t = f.clone() * a[(p, j)].clone();
                    a[(i, j)] = a[(i, j)].clone() - t;
                }
            }
        }
        Definiteness::PositiveDefinite
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_f64())
    }

    pub fn to_json(&self) -> Json {
        Json::Array(
            (0..self.rows)
                .map(|i| Json::Array(self.row(i).iter().map(Scalar::to_json).collect()))
                .collect(),
        )
    }
}

impl Matrix<f64> {
    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}
