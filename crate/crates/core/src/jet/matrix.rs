use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::{Scalar, Tolerance};

use super::{Jet, Valuation};

/// A `rows x cols` matrix of jets sharing one truncation order, stored as
/// the coefficient matrices of `x^0 ..= x^N`.
#[derive(Clone, PartialEq)]
pub struct MatrixJet<S> {
    rows: usize,
    cols: usize,
    coeffs: Vec<Mat<S>>,
}

impl<S: Scalar> MatrixJet<S> {
    /// Builds a jet from its coefficient matrices; all must share a shape.
    pub fn new(coeffs: Vec<Mat<S>>) -> Result<Self> {
        let first = coeffs.first().ok_or(Error::InsufficientTruncation {
            context: "matrix jet construction",
            needed: 0,
            available: 0,
        })?;
        let (rows, cols) = first.shape();
        for c in &coeffs {
            if c.shape() != (rows, cols) {
                return Err(Error::DimensionMismatch {
                    op: "matrix jet coefficients",
                    left: (rows, cols),
                    right: c.shape(),
                });
            }
        }
        Ok(MatrixJet { rows, cols, coeffs })
    }

    /// A polynomial `Σ coeffs[k] x^k` viewed at truncation order `order`.
    /// Terms above `order` are dropped.
    pub fn from_polynomial(coeffs: Vec<Mat<S>>, order: usize) -> Result<Self> {
        let mut j = Self::new(coeffs)?;
        let (rows, cols) = j.shape();
        j.coeffs.truncate(order + 1);
        j.coeffs.resize(order + 1, Mat::zeros(rows, cols));
        Ok(j)
    }

    pub fn zeros(rows: usize, cols: usize, order: usize) -> Self {
        MatrixJet {
            rows,
            cols,
            coeffs: vec![Mat::zeros(rows, cols); order + 1],
        }
    }

    pub fn identity(n: usize, order: usize) -> Self {
        Self::constant(Mat::identity(n), order)
    }

    pub fn constant(m: Mat<S>, order: usize) -> Self {
        let (rows, cols) = m.shape();
        let mut j = Self::zeros(rows, cols, order);
        j.coeffs[0] = m;
        j
    }

    /// Assembles a matrix jet from a grid of scalar jets of equal order.
    pub fn from_entries(entries: &[Vec<Jet<S>>]) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        let order = entries.first().and_then(|r| r.first()).map_or(0, Jet::order);
        let mut out = Self::zeros(rows, cols, order);
        for (i, row) in entries.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    op: "matrix jet entries",
                    left: (rows, cols),
                    right: (rows, row.len()),
                });
            }
            for (j, e) in row.iter().enumerate() {
                out.set_entry(i, j, e)?;
            }
        }
        Ok(out)
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

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Coefficient matrix of `x^k`.
    pub fn coeff(&self, k: usize) -> &Mat<S> {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[Mat<S>] {
        &self.coeffs
    }

    /// Value at the expansion point.
    pub fn value(&self) -> &Mat<S> {
        &self.coeffs[0]
    }

    pub fn entry(&self, i: usize, j: usize) -> Jet<S> {
        Jet::new(self.coeffs.iter().map(|c| c[(i, j)].clone()).collect())
    }

    pub fn set_entry(&mut self, i: usize, j: usize, e: &Jet<S>) -> Result<()> {
        if e.order() != self.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: e.order(),
            });
        }
        for (k, c) in self.coeffs.iter_mut().enumerate() {
            c[(i, j)] = e.coeff(k).clone();
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Self, op: &'static str, same_shape: bool) -> Result<()> {
        let shapes_ok = if same_shape {
            self.shape() == other.shape()
        } else {
            self.cols == other.rows
        };
        if !shapes_ok {
            return Err(Error::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "add", true)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(MatrixJet { coeffs, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "sub", true)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        Ok(MatrixJet { coeffs, ..*self })
    }

    /// Matrix product with Cauchy convolution of coefficients, truncated at
    /// the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "mul", false)?;
        let n = self.order();
        let mut coeffs = vec![Mat::zeros(self.rows, other.cols); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                a.mul_acc_into(b, &mut coeffs[i + j]);
            }
        }
        Ok(MatrixJet {
            rows: self.rows,
            cols: other.cols,
            coeffs,
        })
    }

    /// Product with a constant matrix on the right.
    pub fn mul_constant(&self, m: &Mat<S>) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|c| c.mul(m)).collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }

    pub fn scale(&self, c: &S) -> Self {
        MatrixJet {
            coeffs: self.coeffs.iter().map(|m| m.scale(c)).collect(),
            ..*self
        }
    }

    pub fn neg(&self) -> Self {
        MatrixJet {
            coeffs: self.coeffs.iter().map(Mat::neg).collect(),
            ..*self
        }
    }

    pub fn transpose(&self) -> Self {
        MatrixJet {
            rows: self.cols,
            cols: self.rows,
            coeffs: self.coeffs.iter().map(Mat::transpose).collect(),
        }
    }

    pub fn select_columns(&self, cols: impl IntoIterator<Item = usize> + Clone) -> Self {
        let coeffs: Vec<Mat<S>> = self.coeffs.iter().map(|c| c.select_columns(cols.clone())).collect();
        let ncols = coeffs[0].cols();
        MatrixJet {
            rows: self.rows,
            cols: ncols,
            coeffs,
        }
    }

    pub fn select_rows(&self, rows: impl IntoIterator<Item = usize> + Clone) -> Self {
        let coeffs: Vec<Mat<S>> = self.coeffs.iter().map(|c| c.select_rows(rows.clone())).collect();
        let nrows = coeffs[0].rows();
        MatrixJet {
            rows: nrows,
            cols: self.cols,
            coeffs,
        }
    }

    pub fn column(&self, j: usize) -> Self {
        self.select_columns([j])
    }

    pub fn row(&self, i: usize) -> Self {
        self.select_rows([i])
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.hstack(b))
            .collect::<Result<_>>()?;
        Self::new(coeffs)
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.vstack(b))
            .collect::<Result<_>>()?;
        Self::new(coeffs)
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order());
        MatrixJet {
            coeffs: self.coeffs[..=order].to_vec(),
            ..*self
        }
    }

    /// Extends with zero coefficients up to `order`; exact for polynomials.
    pub fn pad(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order.max(self.order()) + 1, Mat::zeros(self.rows, self.cols));
        MatrixJet { coeffs, ..*self }
    }

    /// Largest power with a nonzero coefficient matrix, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Coefficient matrices up to the degree (at least one entry).
    pub fn polynomial_coeffs(&self) -> Vec<Mat<S>> {
        let d = self.degree().unwrap_or(0);
        self.coeffs[..=d].to_vec()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.iter().map(Mat::max_magnitude).fold(0.0, f64::max)
    }

    /// Magnitude against which the coefficients up to `upto` of `Π factors`
    /// are judged: the product of each factor's largest entry among those
    /// coefficients, each at least 1.
    pub(crate) fn product_scale(factors: &[&Self], upto: usize) -> f64 {
        if S::EXACT {
            return 0.0;
        }
        factors
            .iter()
            .map(|f| {
                f.coeffs[..=upto.min(f.order())]
                    .iter()
                    .map(Mat::max_magnitude)
                    .fold(1.0, f64::max)
            })
            .product()
    }

    pub(crate) fn float_scale(&self) -> f64 {
        if S::EXACT {
            0.0
        } else {
            self.max_magnitude()
        }
    }

    /// Minimal vanishing order over all entries.
    pub fn valuation(&self, tol: &Tolerance) -> Valuation {
        self.valuation_with_scale(tol, self.float_scale())
    }

    pub fn valuation_with_scale(&self, tol: &Tolerance, scale: f64) -> Valuation {
        self.coeffs
            .iter()
            .position(|c| !c.is_negligible(tol, scale))
            .map_or(Valuation::BeyondTruncation, Valuation::Finite)
    }

    /// Vanishing order of each column, with the whole matrix as float scale.
    pub fn column_valuations(&self, tol: &Tolerance, scale: f64) -> Vec<Valuation> {
        (0..self.cols)
            .map(|j| self.column(j).valuation_with_scale(tol, scale))
            .collect()
    }

    pub fn row_valuations(&self, tol: &Tolerance, scale: f64) -> Vec<Valuation> {
        (0..self.rows)
            .map(|i| self.row(i).valuation_with_scale(tol, scale))
            .collect()
    }

    /// Unimodular iff the value at the expansion point is nonsingular.
    pub fn is_unimodular(&self, tol: &Tolerance) -> bool {
        self.is_square() && self.value().rank(tol) == self.rows
    }

    /// Divides column `j` by `x^shifts[j]`. The result has order
    /// `N - max(shifts)`; the dropped low coefficients are not inspected.
    pub fn divide_columns(&self, shifts: &[usize]) -> Result<Self> {
        assert_eq!(shifts.len(), self.cols);
        let max = shifts.iter().copied().max().unwrap_or(0);
        if max > self.order() {
            return Err(Error::InsufficientTruncation {
                context: "column division by powers of x",
                needed: max,
                available: self.order(),
            });
        }
        let order = self.order() - max;
        let coeffs = (0..=order)
            .map(|k| Mat::from_fn(self.rows, self.cols, |i, j| self.coeffs[k + shifts[j]][(i, j)].clone()))
            .collect();
        Ok(MatrixJet { coeffs, ..*self })
    }

    /// Divides row `i` by `x^shifts[i]`; see [`MatrixJet::divide_columns`].
    pub fn divide_rows(&self, shifts: &[usize]) -> Result<Self> {
        Ok(self.transpose().divide_columns(shifts)?.transpose())
    }

    /// Multiplies column `j` by `x^shifts[j]` at the same order.
    pub fn multiply_columns(&self, shifts: &[usize]) -> Self {
        assert_eq!(shifts.len(), self.cols);
        let n = self.order();
        let coeffs = (0..=n)
            .map(|k| {
                Mat::from_fn(self.rows, self.cols, |i, j| {
                    if k >= shifts[j] {
                        self.coeffs[k - shifts[j]][(i, j)].clone()
                    } else {
                        S::zero()
                    }
                })
            })
            .collect();
        MatrixJet { coeffs, ..*self }
    }

    pub fn multiply_rows(&self, shifts: &[usize]) -> Self {
        self.transpose().multiply_columns(shifts).transpose()
    }

    /// Keeps, for each column `j`, only the coefficients of `x^0 ..
    /// x^{limits[j]-1}`.
    pub fn truncate_columns(&self, limits: &[usize]) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                Mat::from_fn(self.rows, self.cols, |i, j| {
                    if k < limits[j] {
                        c[(i, j)].clone()
                    } else {
                        S::zero()
                    }
                })
            })
            .collect();
        MatrixJet { coeffs, ..*self }
    }

    pub fn truncate_rows(&self, limits: &[usize]) -> Self {
        self.transpose().truncate_columns(limits).transpose()
    }
}

/// Inverse of a unimodular matrix jet by the recursion
/// `(M⁻¹)_0 = M_0⁻¹`, `(M⁻¹)_k = -M_0⁻¹ Σ_{j=1..k} M_j (M⁻¹)_{k-j}`.
pub fn unimodular_inverse<S: Scalar>(m: &MatrixJet<S>, tol: &Tolerance) -> Result<MatrixJet<S>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let inv0 = m.value().inverse(tol).ok_or(Error::SingularConstantTerm)?;
    let n = m.rows();
    let mut out: Vec<Mat<S>> = Vec::with_capacity(m.order() + 1);
    out.push(inv0.clone());
    for k in 1..=m.order() {
        let mut acc = Mat::zeros(n, n);
        for j in 1..=k {
            m.coeff(j).mul_acc_into(&out[k - j], &mut acc);
        }
        out.push(inv0.mul(&acc)?.neg());
    }
    MatrixJet::new(out)
}

/// Re-expands `Σ_k poly[k] λ^k` around `point`, returning the Taylor
/// coefficients in `x = λ - point` up to `order`.
#[allow(clippy::needless_range_loop)]
pub fn recenter<S: Scalar>(poly: &[Mat<S>], point: &S, order: usize) -> Result<MatrixJet<S>> {
    let first = poly.first().ok_or(Error::InsufficientTruncation {
        context: "recentering an empty polynomial",
        needed: 0,
        available: 0,
    })?;
    let (rows, cols) = first.shape();
    let degree = poly.len() - 1;
    // binom[k][i] = C(k, i) * point^(k - i)
    let mut weights: Vec<Vec<S>> = Vec::with_capacity(degree + 1);
    weights.push(vec![S::one()]);
    for k in 1..=degree {
        let prev = &weights[k - 1];
        let row: Vec<S> = (0..=k)
            .map(|i| {
                let from_same = if i < k {
                    prev[i].clone() * point.clone()
                } else {
                    S::zero()
                };
                let from_lower = if i > 0 { prev[i - 1].clone() } else { S::zero() };
                from_same + from_lower
            })
            .collect();
        weights.push(row);
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    for i in 0..=order {
        let mut acc = Mat::zeros(rows, cols);
        for (k, p) in poly.iter().enumerate().skip(i) {
            if p.shape() != (rows, cols) {
                return Err(Error::DimensionMismatch {
                    op: "recenter",
                    left: (rows, cols),
                    right: p.shape(),
                });
            }
            acc = acc.add(&p.scale(&weights[k][i]))?;
        }
        coeffs.push(acc);
    }
    MatrixJet::new(coeffs)
}

impl<S: std::fmt::Debug> std::fmt::Debug for MatrixJet<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}
