//! Truncated power series ("jets") in the shifted variable `x = λ - λ₀`.
//!
//! A [`Jet`] of order `N` stores the coefficients of `x^0 ..= x^N`; products
//! discard everything above `x^N`. [`MatrixJet`] is the matrix analogue,
//! stored as one constant coefficient matrix per power of `x`.

mod det;
mod laurent;
mod matrix;

pub use det::{det_adj_jet, det_jet};
pub use laurent::LaurentPart;
pub use matrix::{recenter, unimodular_inverse, MatrixJet};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerance};

/// Order of vanishing of a jet at the expansion point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    /// Smallest power with a nonzero coefficient.
    Finite(usize),
    /// Every stored coefficient vanishes; the true order exceeds `N`.
    BeyondTruncation,
}

impl Valuation {
    pub fn finite(self) -> Option<usize> {
        match self {
            Valuation::Finite(k) => Some(k),
            Valuation::BeyondTruncation => None,
        }
    }

    /// True when the order is known to be at least `k`.
    pub fn at_least(self, k: usize) -> bool {
        match self {
            Valuation::Finite(v) => v >= k,
            Valuation::BeyondTruncation => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Jet<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    /// Panics on an empty coefficient list.
    pub fn new(coeffs: Vec<S>) -> Self {
        assert!(!coeffs.is_empty(), "a jet has at least one coefficient");
        Jet { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Jet {
            coeffs: vec![S::zero(); order + 1],
        }
    }

    pub fn constant(c: S, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.coeffs[0] = c;
        j
    }

    pub fn one(order: usize) -> Self {
        Self::constant(S::one(), order)
    }

    /// `x^k`, which truncates to zero when `k > order`.
    pub fn monomial(k: usize, order: usize) -> Self {
        let mut j = Self::zero(order);
        if k <= order {
            j.coeffs[k] = S::one();
        }
        j
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| S::from_i64(c)).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &S {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Jet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(Jet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.order();
        let mut out = vec![S::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Ok(Jet { coeffs: out })
    }

    pub fn neg(&self) -> Self {
        Jet {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        Jet {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(num_traits::Zero::is_zero)
    }

    /// Vanishing order, with the coefficient magnitude of the jet itself as
    /// the float tolerance scale.
    pub fn valuation(&self, tol: &Tolerance) -> Valuation {
        self.valuation_with_scale(tol, self.max_magnitude_if_float())
    }

    pub fn valuation_with_scale(&self, tol: &Tolerance, scale: f64) -> Valuation {
        self.coeffs
            .iter()
            .position(|c| !c.is_negligible(tol, scale))
            .map_or(Valuation::BeyondTruncation, Valuation::Finite)
    }

    fn max_magnitude_if_float(&self) -> f64 {
        if S::EXACT {
            0.0
        } else {
            self.max_magnitude()
        }
    }

    pub fn is_unit(&self, tol: &Tolerance) -> bool {
        !self.coeffs[0].is_negligible(tol, self.max_magnitude_if_float())
    }

    /// Multiplicative inverse of a unit jet at the same order.
    pub fn inverse(&self, tol: &Tolerance) -> Result<Self> {
        if !self.is_unit(tol) {
            return Err(Error::SingularConstantTerm);
        }
        self.reciprocal()
    }

    /// Inverse for a jet whose constant term the caller has already judged
    /// nonzero; only an exactly zero constant term is rejected.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::SingularConstantTerm);
        }
        let n = self.order();
        let inv0 = S::one() / self.coeffs[0].clone();
        let mut out = vec![S::zero(); n + 1];
        out[0] = inv0.clone();
        for k in 1..=n {
            let mut acc = S::zero();
            for j in 1..=k {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out[k] = -(inv0.clone() * acc);
        }
        Ok(Jet { coeffs: out })
    }

    /// Divides by `x^k`, dropping the lowest `k` coefficients; the result has
    /// order `N - k`. Only meaningful when those coefficients vanish.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if k > self.order() {
            return Err(Error::InsufficientTruncation {
                context: "jet division by a power of x",
                needed: k,
                available: self.order(),
            });
        }
        Ok(Jet {
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    /// Multiplies by `x^k` at the same order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = vec![S::zero(); n + 1];
        for i in 0..=n {
            if i + k <= n {
                out[i + k] = self.coeffs[i].clone();
            }
        }
        Jet { coeffs: out }
    }

    /// Keeps coefficients up to `order`.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order());
        Jet {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    /// Extends to `order` with zero coefficients. Exact for polynomials; for
    /// general series the caller is responsible for tracking precision.
    pub fn pad(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order.max(self.order()) + 1, S::zero());
        Jet { coeffs }
    }
}
