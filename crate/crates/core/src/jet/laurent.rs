use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::{Scalar, Tolerance};

/// Principal part `R_s x^{-s} + … + R_1 x^{-1}` of a meromorphic matrix.
///
/// Coefficients are kept in the order `[R_s, …, R_1]`; the leading one is
/// nonzero, and pole order 0 is the empty list.
#[derive(Clone, PartialEq)]
pub struct LaurentPart<S> {
    rows: usize,
    cols: usize,
    coeffs: Vec<Mat<S>>,
}

impl<S: Scalar> LaurentPart<S> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        LaurentPart {
            rows,
            cols,
            coeffs: Vec::new(),
        }
    }

    /// Builds from `[R_s, …, R_1]`, dropping leading coefficients that vanish
    /// under the backend's zero test.
    pub fn from_descending(rows: usize, cols: usize, coeffs: Vec<Mat<S>>, tol: &Tolerance) -> Result<Self> {
        for c in &coeffs {
            if c.shape() != (rows, cols) {
                return Err(Error::DimensionMismatch {
                    op: "principal part",
                    left: (rows, cols),
                    right: c.shape(),
                });
            }
        }
        let scale = if S::EXACT {
            0.0
        } else {
            coeffs.iter().map(Mat::max_magnitude).fold(0.0, f64::max)
        };
        let lead = coeffs
            .iter()
            .position(|c| !c.is_negligible(tol, scale))
            .unwrap_or(coeffs.len());
        Ok(LaurentPart {
            rows,
            cols,
            coeffs: coeffs[lead..].to_vec(),
        })
    }

    /// Builds from `by_power[j-1] = R_j`, i.e. ascending pole power.
    pub fn from_by_power(rows: usize, cols: usize, mut by_power: Vec<Mat<S>>, tol: &Tolerance) -> Result<Self> {
        by_power.reverse();
        Self::from_descending(rows, cols, by_power, tol)
    }

    pub fn pole_order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// `[R_s, …, R_1]`.
    pub fn coeffs(&self) -> &[Mat<S>] {
        &self.coeffs
    }

    /// `R_j`, the coefficient of `x^{-j}`; zero beyond the pole order.
    pub fn coefficient(&self, j: usize) -> Mat<S> {
        assert!(j >= 1, "principal part coefficients start at x^-1");
        let s = self.pole_order();
        if j > s {
            Mat::zeros(self.rows, self.cols)
        } else {
            self.coeffs[s - j].clone()
        }
    }

    pub fn residue(&self) -> Mat<S> {
        self.coefficient(1)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.iter().map(Mat::max_magnitude).fold(0.0, f64::max)
    }
}

impl<S: std::fmt::Debug> std::fmt::Debug for LaurentPart<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}
