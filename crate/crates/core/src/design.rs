//! Exact and approximate block designs.
//!
//! A design on `v` test treatments and one control is a `(v+1) × d`
//! allocation table. Row 0 is always the control, rows `1..=v` are the test
//! treatments, and column `k` is block `k`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{rat_int, Rational, Scalar, CONSTRUCTION_TOL};

/// Read access shared by exact and approximate designs.
///
/// `Elem` is the scalar used for all derived quantities: exact designs
/// report rationals, approximate designs report their own weight type.
pub trait BlockDesign {
    type Elem: Scalar;

    /// Number of test treatments `v`.
    fn num_tests(&self) -> usize;

    /// Number of blocks `d`.
    fn num_blocks(&self) -> usize;

    /// Allocation `ξ(i, k)`.
    fn weight(&self, treatment: usize, block: usize) -> Self::Elem;

    /// Whether treatment `i` appears in block `k`.
    fn occupies(&self, treatment: usize, block: usize) -> bool;

    fn num_treatments(&self) -> usize {
        self.num_tests() + 1
    }

    /// Column sums `s_k` over all `v + 1` rows.
    fn block_totals(&self) -> Vec<Self::Elem> {
        (0..self.num_blocks())
            .map(|k| {
                (0..self.num_treatments()).fold(Self::Elem::zero(), |acc, i| acc + self.weight(i, k))
            })
            .collect()
    }

    /// Row sums `r_i`.
    fn replications(&self) -> Vec<Self::Elem> {
        (0..self.num_treatments())
            .map(|i| (0..self.num_blocks()).fold(Self::Elem::zero(), |acc, k| acc + self.weight(i, k)))
            .collect()
    }

    fn to_rows(&self) -> Vec<Vec<Self::Elem>> {
        (0..self.num_treatments())
            .map(|i| (0..self.num_blocks()).map(|k| self.weight(i, k)).collect())
            .collect()
    }
}

/// Integer allocation of trials with prescribed block sizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactDesign {
    v: usize,
    d: usize,
    m: Vec<u64>,
    cells: Vec<u64>,
}

impl ExactDesign {
    /// Builds a design and checks every column against the block sizes `m`.
    pub fn new(m: Vec<u64>, allocation: Vec<Vec<u64>>) -> Result<Self> {
        if allocation.len() < 2 {
            return Err(Error::InvalidDesign("need a control row and at least one test row".into()));
        }
        let d = m.len();
        if d == 0 {
            return Err(Error::InvalidDesign("need at least one block".into()));
        }
        if let Some(k) = m.iter().position(|&x| x == 0) {
            return Err(Error::ZeroBlockSize { block: k });
        }
        if let Some(i) = allocation.iter().position(|row| row.len() != d) {
            return Err(Error::InvalidDesign(format!(
                "row {i} has {} entries, expected {d}",
                allocation[i].len()
            )));
        }
        for (k, &mk) in m.iter().enumerate() {
            let col: u64 = allocation.iter().map(|row| row[k]).sum();
            if col != mk {
                return Err(Error::InvalidDesign(format!(
                    "block {} holds {col} trials but its size is {mk}",
                    k + 1
                )));
            }
        }
        Ok(Self { v: allocation.len() - 1, d, m, cells: allocation.into_iter().flatten().collect() })
    }

    /// Builds a design whose block sizes are its column sums.
    pub fn from_rows(allocation: Vec<Vec<u64>>) -> Result<Self> {
        let d = allocation.first().map_or(0, Vec::len);
        let m = (0..d).map(|k| allocation.iter().map(|row| row.get(k).copied().unwrap_or(0)).sum()).collect();
        Self::new(m, allocation)
    }

    pub(crate) fn from_columns_unchecked(v: usize, m: &[u64], columns: &[&[u64]]) -> Self {
        let d = m.len();
        let mut cells = vec![0; (v + 1) * d];
        for (k, col) in columns.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                cells[i * d + k] = x;
            }
        }
        Self { v, d, m: m.to_vec(), cells }
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn block_sizes(&self) -> &[u64] {
        &self.m
    }

    /// Total number of trials `n`.
    pub fn n(&self) -> u64 {
        self.m.iter().sum()
    }

    pub fn get(&self, treatment: usize, block: usize) -> u64 {
        self.cells[treatment * self.d + block]
    }

    pub fn row(&self, treatment: usize) -> &[u64] {
        &self.cells[treatment * self.d..(treatment + 1) * self.d]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        (0..=self.v).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn integer_replications(&self) -> Vec<u64> {
        (0..=self.v).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Common block size, if every block has the same size.
    pub fn equal_block_size(&self) -> Option<u64> {
        let q = self.m[0];
        self.m.iter().all(|&x| x == q).then_some(q)
    }

    pub fn integer_concurrence(&self, i: usize, j: usize) -> u64 {
        self.row(i).iter().zip(self.row(j)).map(|(a, b)| a * b).sum()
    }

    /// Divides every entry by `n`.
    pub fn normalize(&self) -> ApproximateDesign<Rational> {
        let n = rat_int(self.n());
        ApproximateDesign {
            v: self.v,
            d: self.d,
            cells: self.cells.iter().map(|&x| rat_int(x) / n.clone()).collect(),
        }
    }

    /// Relabels test treatments: test `j` of `self` becomes test `π(j)`.
    pub fn permute_tests(&self, perm: &TestPermutation) -> Result<Self> {
        perm.check_order(self.v)?;
        let mut out = self.clone();
        for j in 1..=self.v {
            let target = perm.image(j);
            out.cells[target * self.d..(target + 1) * self.d].copy_from_slice(self.row(j));
        }
        Ok(out)
    }
}

impl BlockDesign for ExactDesign {
    type Elem = Rational;

    fn num_tests(&self) -> usize {
        self.v
    }

    fn num_blocks(&self) -> usize {
        self.d
    }

    fn weight(&self, treatment: usize, block: usize) -> Rational {
        rat_int(self.get(treatment, block))
    }

    fn occupies(&self, treatment: usize, block: usize) -> bool {
        self.get(treatment, block) > 0
    }

    fn block_totals(&self) -> Vec<Rational> {
        self.m.iter().map(|&x| rat_int(x)).collect()
    }
}

/// Allocation of trial proportions summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximateDesign<T> {
    v: usize,
    d: usize,
    cells: Vec<T>,
}

impl<T: Scalar> ApproximateDesign<T> {
    /// Validates nonnegativity, unit total (exact for rationals, within
    /// `1e-12` for reals) and positive block weights.
    pub fn new(allocation: Vec<Vec<T>>) -> Result<Self> {
        if allocation.len() < 2 {
            return Err(Error::InvalidDesign("need a control row and at least one test row".into()));
        }
        let d = allocation[0].len();
        if d == 0 {
            return Err(Error::InvalidDesign("need at least one block".into()));
        }
        if allocation.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidDesign("ragged allocation table".into()));
        }
        if allocation.iter().flatten().any(|x| x.lt_zero()) {
            return Err(Error::InvalidDesign("negative allocation".into()));
        }
        let design = Self { v: allocation.len() - 1, d, cells: allocation.into_iter().flatten().collect() };
        let total = design.cells.iter().cloned().fold(T::zero(), |a, b| a + b);
        if !total.approx_eq(&T::one(), CONSTRUCTION_TOL) {
            return Err(Error::InvalidDesign(format!("allocation sums to {:?}, not 1", total)));
        }
        if let Some(k) = design.block_totals().iter().position(|s| !s.gt_zero()) {
            return Err(Error::ZeroBlockSize { block: k });
        }
        Ok(design)
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, treatment: usize, block: usize) -> &T {
        &self.cells[treatment * self.d + block]
    }

    pub fn row(&self, treatment: usize) -> &[T] {
        &self.cells[treatment * self.d..(treatment + 1) * self.d]
    }

    pub fn permute_tests(&self, perm: &TestPermutation) -> Result<Self> {
        perm.check_order(self.v)?;
        let mut out = self.clone();
        for j in 1..=self.v {
            let target = perm.image(j);
            out.cells[target * self.d..(target + 1) * self.d].clone_from_slice(self.row(j));
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> ApproximateDesign<f64> {
        ApproximateDesign { v: self.v, d: self.d, cells: self.cells.iter().map(Scalar::to_f64).collect() }
    }
}

impl<T: Scalar> BlockDesign for ApproximateDesign<T> {
    type Elem = T;

    fn num_tests(&self) -> usize {
        self.v
    }

    fn num_blocks(&self) -> usize {
        self.d
    }

    fn weight(&self, treatment: usize, block: usize) -> T {
        self.get(treatment, block).clone()
    }

    fn occupies(&self, treatment: usize, block: usize) -> bool {
        self.get(treatment, block).gt_zero()
    }
}

/// Any of the supported design flavours, as read from a design file.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyDesign {
    Exact(ExactDesign),
    Rational(ApproximateDesign<Rational>),
    Real(ApproximateDesign<f64>),
}

impl AnyDesign {
    pub fn v(&self) -> usize {
        match self {
            AnyDesign::Exact(x) => x.v(),
            AnyDesign::Rational(x) => x.v(),
            AnyDesign::Real(x) => x.v(),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            AnyDesign::Exact(x) => x.d(),
            AnyDesign::Rational(x) => x.d(),
            AnyDesign::Real(x) => x.d(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnyDesign::Exact(_))
    }
}

impl From<ExactDesign> for AnyDesign {
    fn from(d: ExactDesign) -> Self {
        AnyDesign::Exact(d)
    }
}

impl From<ApproximateDesign<Rational>> for AnyDesign {
    fn from(d: ApproximateDesign<Rational>) -> Self {
        AnyDesign::Rational(d)
    }
}

impl From<ApproximateDesign<f64>> for AnyDesign {
    fn from(d: ApproximateDesign<f64>) -> Self {
        AnyDesign::Real(d)
    }
}

/// Replication totals, block totals and the control/test split of a design.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSummary<T> {
    /// Row sums, length `v + 1`.
    pub r: Vec<T>,
    /// Column sums, length `d`.
    pub s: Vec<T>,
    /// Test rows, `v × d`.
    pub tests: Vec<Vec<T>>,
    /// Control row, length `d`.
    pub control: Vec<T>,
}

pub fn summarize<D: BlockDesign>(design: &D) -> DesignSummary<D::Elem> {
    let mut rows = design.to_rows();
    let control = rows.remove(0);
    DesignSummary { r: design.replications(), s: design.block_totals(), tests: rows, control }
}

/// `μ_ij = Σ_k ξ(i,k) ξ(j,k)`.
pub fn concurrence<D: BlockDesign>(design: &D, i: usize, j: usize) -> Result<D::Elem> {
    let max = design.num_tests();
    for idx in [i, j] {
        if idx > max {
            return Err(Error::IndexOutOfRange { index: idx, max });
        }
    }
    Ok((0..design.num_blocks())
        .fold(D::Elem::zero(), |acc, k| acc + design.weight(i, k) * design.weight(j, k)))
}

/// Product design `ξ(i,k) = r_i s_k`.
pub fn product_design<T: Scalar>(r: &[T], s: &[T]) -> Result<ApproximateDesign<T>> {
    check_weights("r", r, false)?;
    check_weights("s", s, true)?;
    if r.len() < 2 {
        return Err(Error::InvalidWeights("r needs a control entry and at least one test entry".into()));
    }
    let d = s.len();
    Ok(ApproximateDesign {
        v: r.len() - 1,
        d,
        cells: r.iter().flat_map(|ri| s.iter().map(move |sk| ri.clone() * sk.clone())).collect(),
    })
}

pub(crate) fn check_weights<T: Scalar>(name: &str, w: &[T], strictly_positive: bool) -> Result<()> {
    if w.is_empty() {
        return Err(Error::InvalidWeights(format!("{name} is empty")));
    }
    if strictly_positive && w.iter().any(|x| !x.gt_zero()) {
        return Err(Error::InvalidWeights(format!("{name} must be strictly positive")));
    }
    if w.iter().any(|x| x.lt_zero()) {
        return Err(Error::InvalidWeights(format!("{name} must be nonnegative")));
    }
    let total = w.iter().cloned().fold(T::zero(), |a, b| a + b);
    if !total.approx_eq(&T::one(), CONSTRUCTION_TOL) {
        return Err(Error::InvalidWeights(format!("{name} sums to {total:?}, not 1")));
    }
    Ok(())
}

/// Bijection on the test treatments `1..=v`; the control is always fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestPermutation {
    images: Vec<usize>,
}

impl TestPermutation {
    /// `images[j - 1]` is the new label of test treatment `j`.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let v = images.len();
        let mut seen = vec![false; v + 1];
        for &x in &images {
            if x == 0 || x > v {
                return Err(Error::InvalidPermutation(format!("label {x} outside 1..={v}")));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPermutation(format!("label {x} repeated")));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(v: usize) -> Self {
        Self { images: (1..=v).collect() }
    }

    /// Swaps test treatments `a` and `b`.
    pub fn transposition(v: usize, a: usize, b: usize) -> Result<Self> {
        let mut images: Vec<usize> = (1..=v).collect();
        if a == 0 || b == 0 || a > v || b > v {
            return Err(Error::InvalidPermutation(format!("cannot swap {a} and {b} among 1..={v}")));
        }
        images.swap(a - 1, b - 1);
        Ok(Self { images })
    }

    pub fn order(&self) -> usize {
        self.images.len()
    }

    /// Image of treatment `j` (the control maps to itself).
    pub fn image(&self, j: usize) -> usize {
        if j == 0 { 0 } else { self.images[j - 1] }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (j, &x) in self.images.iter().enumerate() {
            images[x - 1] = j + 1;
        }
        Self { images }
    }

    fn check_order(&self, v: usize) -> Result<()> {
        if self.images.len() != v {
            return Err(Error::InvalidPermutation(format!(
                "permutation of {} labels applied to {v} test treatments",
                self.images.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn unequal_blocks_design() -> ExactDesign {
        ExactDesign::new(vec![2, 2, 4], vec![vec![1, 1, 2], vec![1, 0, 1], vec![0, 1, 1]]).unwrap()
    }

    #[test]
    fn summary_of_unequal_block_design() {
        let s = summarize(&unequal_blocks_design());
        assert_eq!(s.r, vec![rat(4, 1), rat(2, 1), rat(2, 1)]);
        assert_eq!(s.s, vec![rat(2, 1), rat(2, 1), rat(4, 1)]);
        assert_eq!(s.control, vec![rat(1, 1), rat(1, 1), rat(2, 1)]);
        assert_eq!(s.tests.len(), 2);
    }

    #[test]
    fn control_only_design_puts_everything_on_row_zero() {
        let d = ExactDesign::new(vec![3, 2], vec![vec![3, 2], vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(d.integer_replications(), vec![5, 0, 0]);
    }

    #[test]
    fn concurrence_sums_over_blocks() {
        let d = unequal_blocks_design();
        assert_eq!(concurrence(&d, 0, 1).unwrap(), rat(3, 1));
        assert_eq!(concurrence(&d, 1, 0).unwrap(), rat(3, 1));
        assert!(matches!(concurrence(&d, 0, 3), Err(Error::IndexOutOfRange { index: 3, max: 2 })));
        let unused = ExactDesign::from_rows(vec![vec![1, 1], vec![1, 1], vec![0, 0]]).unwrap();
        assert_eq!(concurrence(&unused, 0, 2).unwrap(), rat(0, 1));
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(ExactDesign::new(vec![2, 0], vec![vec![2, 0], vec![0, 0]]), Err(Error::ZeroBlockSize { block: 1 })));
        assert!(ExactDesign::new(vec![2, 2], vec![vec![1, 1], vec![1, 0]]).is_err());
        assert!(ExactDesign::new(vec![2], vec![vec![2]]).is_err());
        assert!(ApproximateDesign::new(vec![vec![0.5], vec![0.25]]).is_err());
        assert!(ApproximateDesign::new(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).is_err());
        assert!(ApproximateDesign::new(vec![vec![rat(3, 2)], vec![rat(-1, 2)]]).is_err());
    }

    #[test]
    fn normalize_divides_by_n() {
        let a = unequal_blocks_design().normalize();
        assert_eq!(a.row(0), &[rat(1, 8), rat(1, 8), rat(1, 4)]);
        assert_eq!(a.row(1), &[rat(1, 8), rat(0, 1), rat(1, 8)]);
        assert_eq!(a.row(2), &[rat(0, 1), rat(1, 8), rat(1, 8)]);
        assert_eq!(a.block_totals(), vec![rat(1, 4), rat(1, 4), rat(1, 2)]);

        let single = ExactDesign::new(vec![1], vec![vec![1], vec![0]]).unwrap().normalize();
        assert_eq!(single.row(0), &[rat(1, 1)]);
    }

    #[test]
    fn product_design_entries() {
        let r = [rat(1, 2), rat(1, 4), rat(1, 4)];
        let s = [rat(1, 3), rat(1, 3), rat(1, 3)];
        let p = product_design(&r, &s).unwrap();
        assert_eq!(p.get(0, 1), &rat(1, 6));
        assert_eq!(p.get(1, 2), &rat(1, 12));
        let sum = summarize(&p);
        assert_eq!(sum.r, r.to_vec());
        assert_eq!(sum.s, s.to_vec());

        let control_only = product_design(&[rat(1, 1), rat(0, 1)], &s).unwrap();
        assert_eq!(control_only.row(0), &s);
        assert!(control_only.row(1).iter().all(|x| *x == rat(0, 1)));

        assert!(product_design(&[rat(1, 2), rat(1, 4)], &s).is_err());
        assert!(product_design(&r, &[rat(1, 1), rat(0, 1)]).is_err());
    }

    #[test]
    fn permutation_swaps_rows_and_concurrences() {
        let d = unequal_blocks_design();
        let swap = TestPermutation::transposition(2, 1, 2).unwrap();
        let p = d.permute_tests(&swap).unwrap();
        assert_eq!(p.row(1), d.row(2));
        assert_eq!(p.row(2), d.row(1));
        assert_eq!(p.row(0), d.row(0));
        assert_eq!(concurrence(&p, 0, 1).unwrap(), concurrence(&d, 0, 2).unwrap());
        assert_eq!(p.permute_tests(&swap).unwrap(), d);
        assert_eq!(d.permute_tests(&TestPermutation::identity(2)).unwrap(), d);
    }

    #[test]
    fn permutation_validation() {
        assert!(TestPermutation::new(vec![1, 1]).is_err());
        assert!(TestPermutation::new(vec![0, 1]).is_err());
        assert!(TestPermutation::new(vec![2, 3]).is_err());
        let p = TestPermutation::new(vec![2, 3, 1]).unwrap();
        assert_eq!(p.inverse().image(2), 1);
        assert!(unequal_blocks_design().permute_tests(&p).is_err());
    }
}
