//! Dense constant matrices over a [`Scalar`] field, with the elimination
//! routines (reduced echelon form, rank, kernels, solves) the rest of the
//! crate builds on.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerance};

#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            data.extend(row);
        }
        Mat {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| S::from_i64(v)).collect())
                .collect(),
        )
    }

    /// A single column from its entries.
    pub fn column_vector(entries: Vec<S>) -> Self {
        let n = entries.len();
        Mat {
            rows: n,
            cols: 1,
            data: entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn select_columns(&self, cols: impl IntoIterator<Item = usize>) -> Self {
        let cols: Vec<usize> = cols.into_iter().collect();
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])].clone())
    }

    pub fn select_rows(&self, rows: impl IntoIterator<Item = usize>) -> Self {
        let rows: Vec<usize> = rows.into_iter().collect();
        Self::from_fn(rows.len(), self.cols, |i, j| self[(rows[i], j)].clone())
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                op: "hstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        }))
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                op: "vstack",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "add")?;
        Ok(self.zip_with(other, |a, b| a.clone() + b.clone()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "sub")?;
        Ok(self.zip_with(other, |a, b| a.clone() - b.clone()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        self.mul_acc_into(other, &mut out);
        Ok(out)
    }

    /// `acc += self * other`, dimensions assumed compatible.
    pub(crate) fn mul_acc_into(&self, other: &Self, acc: &mut Self) {
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.clone() * b.clone();
                    let slot = &mut acc[(i, j)];
                    *slot = slot.clone() + prod;
                }
            }
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Entry-wise conversion to another coefficient type.
    pub fn map_into<T>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Zero test under the backend's rules; `scale` is the magnitude of the
    /// data this matrix was derived from.
    pub fn is_negligible(&self, tol: &Tolerance, scale: f64) -> bool {
        self.data.iter().all(|x| x.is_negligible(tol, scale))
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(other.data.iter()).map(|(a, b)| f(a, b)).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Gauss–Jordan elimination restricted to the first `pivot_cols` columns.
    /// Returns the reduced matrix and the pivot columns.
    ///
    /// Exact scalars take the first nonzero entry as pivot (the reduced form
    /// is unique, so this is canonical). Floating-point scalars use complete
    /// pivoting over the eligible columns and stop once the largest remaining
    /// entry is below `tol.threshold(max |a_ij|)`; the pivot columns are then
    /// listed in elimination order, not sorted.
    fn reduce(&self, pivot_cols: usize, tol: &Tolerance) -> (Self, Vec<usize>) {
        let scale = if S::EXACT { 0.0 } else { self.max_magnitude() };
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        let mut next_col = 0;
        while row < a.rows && next_col < pivot_cols {
            let pick = if S::EXACT {
                let col = next_col;
                next_col += 1;
                (row..a.rows).find(|&i| !a[(i, col)].is_zero()).map(|i| (i, col))
            } else {
                let mut best: Option<(usize, usize, f64)> = None;
                for i in row..a.rows {
                    for j in (0..pivot_cols).filter(|j| !pivots.contains(j)) {
                        let v = a[(i, j)].magnitude();
                        if best.is_none_or(|b| v > b.2) {
                            best = Some((i, j, v));
                        }
                    }
                }
                match best {
                    Some((i, j, _)) if !a[(i, j)].is_negligible(tol, scale) => Some((i, j)),
                    _ => {
                        for i in row..a.rows {
                            for j in (0..pivot_cols).filter(|j| !pivots.contains(j)) {
                                a[(i, j)] = S::zero();
                            }
                        }
                        break;
                    }
                }
            };
            let Some((p, col)) = pick else {
                continue;
            };
            a.swap_rows(row, p);
            // with complete pivoting, earlier columns may still be nonzero
            let first = if S::EXACT { col } else { 0 };
            let inv = S::one() / a[(row, col)].clone();
            for j in first..a.cols {
                let v = a[(row, j)].clone() * inv.clone();
                a[(row, j)] = v;
            }
            for i in 0..a.rows {
                if i == row || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in first..a.cols {
                    if a[(row, j)].is_zero() {
                        continue;
                    }
                    let v = a[(i, j)].clone() - f.clone() * a[(row, j)].clone();
                    a[(i, j)] = v;
                }
                a[(i, col)] = S::zero();
            }
            pivots.push(col);
            row += 1;
        }
        (a, pivots)
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self, tol: &Tolerance) -> (Self, Vec<usize>) {
        self.reduce(self.cols, tol)
    }

    pub fn rank(&self, tol: &Tolerance) -> usize {
        self.rref(tol).1.len()
    }

    /// Basis of the right kernel as the columns of a `cols x k` matrix. The
    /// basis is the one read off the reduced echelon form: one vector per
    /// free column, with a unit entry in that column.
    pub fn nullspace(&self, tol: &Tolerance) -> Self {
        let (r, pivots) = self.rref(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Self::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis[(f, k)] = S::one();
            for (prow, &pc) in pivots.iter().enumerate() {
                basis[(pc, k)] = -r[(prow, f)].clone();
            }
        }
        basis
    }

    /// Basis of the left kernel as the rows of a `k x rows` matrix.
    pub fn left_nullspace(&self, tol: &Tolerance) -> Self {
        self.transpose().nullspace(tol).transpose()
    }

    /// Canonical basis of the column space: the nonzero rows of the reduced
    /// echelon form of the transpose, returned as columns.
    pub fn column_basis(&self, tol: &Tolerance) -> Self {
        let (r, pivots) = self.transpose().rref(tol);
        r.select_rows(0..pivots.len()).transpose()
    }

    /// One solution `X` of `self * X = rhs`, with free variables set to zero.
    pub fn solve(&self, rhs: &Self, tol: &Tolerance) -> Result<Self> {
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch {
                op: "solve",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let aug = self.hstack(rhs)?;
        let (r, pivots) = aug.reduce(self.cols, tol);
        let mut x = Self::zeros(self.cols, rhs.cols);
        for (prow, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x[(pc, j)] = r[(prow, self.cols + j)].clone();
            }
        }
        // leftover rows carry residuals of size about |A| |x|
        let scale = if S::EXACT {
            0.0
        } else {
            aug.max_magnitude() * x.max_magnitude().max(1.0)
        };
        for i in pivots.len()..r.rows {
            for j in self.cols..r.cols {
                if !r[(i, j)].is_negligible(tol, scale) {
                    return Err(Error::Inconsistent);
                }
            }
        }
        Ok(x)
    }

    /// Inverse of a square matrix, or `None` when it is singular under the
    /// active backend.
    pub fn inverse(&self, tol: &Tolerance) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let aug = self.hstack(&Self::identity(self.rows)).ok()?;
        let (r, pivots) = aug.reduce(self.cols, tol);
        if pivots.len() < self.rows {
            return None;
        }
        let mut inv = Self::zeros(self.rows, self.rows);
        for (prow, &pc) in pivots.iter().enumerate() {
            for j in 0..self.rows {
                inv[(pc, j)] = r[(prow, self.cols + j)].clone();
            }
        }
        Some(inv)
    }

    /// True when the column span of `other` lies inside that of `self`.
    pub fn column_span_contains(&self, other: &Self, tol: &Tolerance) -> bool {
        match self.hstack(other) {
            Ok(joined) => joined.rank(tol) == self.rank(tol),
            Err(_) => false,
        }
    }
}

/// Rank and a kernel basis of a constant matrix.
pub fn rank_and_nullspace<S: Scalar>(m: &Mat<S>, tol: &Tolerance) -> (usize, Mat<S>) {
    let basis = m.nullspace(tol);
    (m.cols() - basis.cols(), basis)
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<S: fmt::Debug> fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for row in self.data.chunks(self.cols.max(1)).take(self.rows) {
            list.entry(&row);
        }
        list.finish()
    }
}

impl<S: Scalar> fmt::Display for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)].render())?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
