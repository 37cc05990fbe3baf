//! Laurent expansion of `T⁻¹` from `adj(T) / det(T)`.
//!
//! Shares nothing with the principal-part constructions beyond jet
//! arithmetic, so it serves as ground truth for all of them.

use std::fmt;

use crate::certificate::Check;
use crate::error::{Error, Result};
use crate::jet::{det_adj_jet, LaurentPart, MatrixJet, Valuation};
use crate::matrix::Mat;
use crate::scalar::{Scalar, Tolerance};

/// Coefficients of `x^{-s}, …, x^K` in the expansion of `T⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentExpansion<S> {
    pub s: usize,
    pub regular_order: usize,
    coeffs: Vec<Mat<S>>,
}

impl<S: Scalar> LaurentExpansion<S> {
    /// Coefficient of `x^power`, for `-s ≤ power ≤ K`.
    pub fn coefficient(&self, power: isize) -> &Mat<S> {
        let idx = power + self.s as isize;
        assert!(
            idx >= 0 && (idx as usize) < self.coeffs.len(),
            "power {power} outside the computed range"
        );
        &self.coeffs[idx as usize]
    }

    pub fn coeffs(&self) -> &[Mat<S>] {
        &self.coeffs
    }

    pub fn principal_part(&self) -> LaurentPart<S> {
        let (rows, cols) = self.coeffs[0].shape();
        LaurentPart::from_descending(rows, cols, self.coeffs[..self.s].to_vec(), &Tolerance::default())
            .expect("uniform shapes")
    }

    /// `T · T⁻¹ = I` on every power from `-s` to `K`.
    pub fn self_check(&self, t: &MatrixJet<S>, tol: &Tolerance) -> Check {
        let n = t.rows();
        let scale = t.float_scale() * self.coeffs.iter().map(Mat::max_magnitude).fold(0.0, f64::max);
        let mut worst = 0.0_f64;
        let mut pass = true;
        for q in -(self.s as isize)..=self.regular_order as isize {
            let mut acc = Mat::zeros(n, n);
            for a in 0..=(q + self.s as isize) as usize {
                if a > t.order() {
                    break;
                }
                t.coeff(a).mul_acc_into(self.coefficient(q - a as isize), &mut acc);
            }
            if q == 0 {
                acc = acc.sub(&Mat::identity(n)).expect("square");
            }
            worst = worst.max(acc.max_magnitude());
            pass &= acc.is_negligible(tol, scale.max(1.0));
        }
        Check::new(
            "T · T⁻¹ = I (oracle)",
            pass,
            worst,
            format!("powers {}..={}", -(self.s as isize), self.regular_order),
        )
    }
}

/// `T⁻¹` to regular order `regular_order`; needs truncation
/// `N ≥ κ + s + K` with `κ` the zero order of `det T`.
pub fn laurent_inverse<S: Scalar>(
    t: &MatrixJet<S>,
    regular_order: usize,
    tol: &Tolerance,
) -> Result<LaurentExpansion<S>> {
    let order = t.order();
    let (det, adj) = det_adj_jet(t)?;
    let kappa = det
        .valuation(tol)
        .finite()
        .ok_or(Error::NotInvertibleWithinTruncation { order })?;
    let mu = match adj.valuation(tol) {
        Valuation::Finite(mu) => mu,
        Valuation::BeyondTruncation => {
            return Err(Error::InsufficientTruncation {
                context: "oracle (adjugate vanishes to the truncation order)",
                needed: order + 1,
                available: order,
            })
        }
    };
    if mu > kappa {
        return Err(Error::CrossCheck(format!(
            "adjugate vanishes to order {mu}, beyond the determinant's {kappa}"
        )));
    }
    let s = kappa - mu;
    let needed = kappa + s + regular_order;
    if needed > order {
        return Err(Error::InsufficientTruncation {
            context: "oracle Laurent expansion",
            needed,
            available: order,
        });
    }
    // T⁻¹ = x^{-s} · (adj / x^μ) · (det / x^κ)⁻¹, valid to order N - κ
    let unit_inv = det.shift_down(kappa)?.inverse(tol)?;
    let reduced = adj.divide_columns(&vec![mu; adj.cols()])?;
    let k = order - kappa;
    let reduced = reduced.truncate(k);
    let mut coeffs = Vec::with_capacity(s + regular_order + 1);
    for q in 0..=s + regular_order {
        let mut acc = Mat::zeros(t.rows(), t.cols());
        for a in 0..=q {
            acc = acc.add(&reduced.coeff(a).scale(unit_inv.coeff(q - a)))?;
        }
        coeffs.push(acc);
    }
    Ok(LaurentExpansion {
        s,
        regular_order,
        coeffs,
    })
}

/// Outcome of comparing a principal part against the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub pass: bool,
    pub max_deviation: f64,
    /// First offending `(j, row, col)` for the coefficient of `x^{-j}`,
    /// zero-based indices.
    pub first_mismatch: Option<(usize, usize, usize)>,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.first_mismatch {
            None => write!(f, "match (max deviation {:.3e})", self.max_deviation),
            Some((j, a, b)) => write!(
                f,
                "mismatch in R_{j} at ({}, {}), max deviation {:.3e}",
                a + 1,
                b + 1,
                self.max_deviation
            ),
        }
    }
}

/// Coefficient-wise comparison. A differing pole order is an error; exact
/// scalars must agree identically, floats within the tolerance scaled by
/// the oracle's largest coefficient.
pub fn compare<S: Scalar>(pp: &LaurentPart<S>, oracle: &LaurentExpansion<S>, tol: &Tolerance) -> Result<Comparison> {
    let expected = oracle.principal_part();
    let scale = expected.max_magnitude();
    let trimmed = LaurentPart::from_descending(pp.shape().0, pp.shape().1, pp.coeffs().to_vec(), &scaled(tol, scale))?;
    if trimmed.pole_order() != expected.pole_order() {
        return Err(Error::PoleOrderMismatch {
            expected: expected.pole_order(),
            found: trimmed.pole_order(),
        });
    }
    let mut max_deviation = 0.0_f64;
    let mut first_mismatch = None;
    for j in (1..=expected.pole_order()).rev() {
        let diff = trimmed.coefficient(j).sub(&expected.coefficient(j))?;
        max_deviation = max_deviation.max(diff.max_magnitude());
        if first_mismatch.is_none() {
            let (rows, cols) = diff.shape();
            'scan: for a in 0..rows {
                for b in 0..cols {
                    if !diff[(a, b)].is_negligible(tol, scale) {
                        first_mismatch = Some((j, a, b));
                        break 'scan;
                    }
                }
            }
        }
    }
    Ok(Comparison {
        pass: first_mismatch.is_none(),
        max_deviation,
        first_mismatch,
    })
}

/// A tolerance whose absolute part already includes the relative part at
/// `scale`, so entries of different jets are judged on one scale.
fn scaled(tol: &Tolerance, scale: f64) -> Tolerance {
    Tolerance::new(tol.threshold(scale), 0.0)
}
