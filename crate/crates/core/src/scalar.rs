//! Coefficient fields.
//!
//! Every jet coefficient lives in a type implementing [`Scalar`]. Two
//! families are provided: exact rationals ([`BigRational`]), where zero tests
//! are decidable, and IEEE doubles (`f64`, [`Complex64`]), where a zero test
//! is a comparison against a [`Tolerance`] scaled by a caller-supplied
//! magnitude.

use std::fmt::Debug;
use std::ops::{Div, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Absolute and relative thresholds for rank and zero decisions on the
/// floating-point backends. Ignored entirely by exact scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const DEFAULT_ABS: f64 = 1e-10;
    pub const DEFAULT_REL: f64 = 1e-8;

    /// Panics if either threshold is negative or not finite.
    pub fn new(abs: f64, rel: f64) -> Self {
        assert!(abs.is_finite() && abs >= 0.0, "tol_abs must be finite and nonnegative");
        assert!(rel.is_finite() && rel >= 0.0, "tol_rel must be finite and nonnegative");
        Tolerance { abs, rel }
    }

    /// Threshold below which a value is treated as zero, given the magnitude
    /// of the data it was computed from.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: Self::DEFAULT_ABS,
            rel: Self::DEFAULT_REL,
        }
    }
}

/// A field element usable as a jet coefficient.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Div<Output = Self>
    + 'static
{
    /// True when equality and zero tests are exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn from_rational(q: &BigRational) -> Self;

    /// A nonnegative magnitude used for pivoting and tolerance scaling.
    fn magnitude(&self) -> f64;

    /// Zero test: exact for rationals, `|x| <= tol.abs + tol.rel * scale`
    /// for floating-point values.
    fn is_negligible(&self, tol: &Tolerance, scale: f64) -> bool;

    /// Short human-readable rendering used by text reports.
    fn render(&self) -> String;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn is_negligible(&self, _tol: &Tolerance, _scale: f64) -> bool {
        self.is_zero()
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(q: &BigRational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn is_negligible(&self, tol: &Tolerance, scale: f64) -> bool {
        self.abs() <= tol.threshold(scale)
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_rational(q: &BigRational) -> Self {
        Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn is_negligible(&self, tol: &Tolerance, scale: f64) -> bool {
        self.norm() <= tol.threshold(scale)
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

/// Shorthand for building a rational `num/den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
