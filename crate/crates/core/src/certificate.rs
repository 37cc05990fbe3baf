//! Pass/fail records for verification steps.

use std::fmt;

use crate::jet::MatrixJet;
use crate::matrix::Mat;
use crate::scalar::{Scalar, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Largest offending magnitude; zero for exact passes and for checks
    /// that are purely combinatorial.
    pub residual: f64,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, residual: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            residual,
            detail: detail.into(),
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self::new(name, pass, 0.0, detail)
    }

    /// Passes when `m` vanishes under the backend's zero test.
    pub fn zero_matrix<S: Scalar>(name: impl Into<String>, m: &Mat<S>, tol: &Tolerance, scale: f64) -> Self {
        let residual = m.max_magnitude();
        let pass = m.is_negligible(tol, scale);
        Self::new(name, pass, residual, format!("max residual {residual:.3e}"))
    }

    /// Passes when every stored coefficient of `m` vanishes.
    pub fn zero_jet<S: Scalar>(name: impl Into<String>, m: &MatrixJet<S>, tol: &Tolerance, scale: f64) -> Self {
        let residual = m.max_magnitude();
        let bad = m.coeffs().iter().position(|c| !c.is_negligible(tol, scale));
        let detail = match bad {
            None => format!("max residual {residual:.3e}"),
            Some(k) => format!("nonzero coefficient at power {k}, max residual {residual:.3e}"),
        };
        Self::new(name, bad.is_none(), residual, detail)
    }
}

/// A named list of checks; passes when all of them do.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub name: String,
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn new(name: impl Into<String>) -> Self {
        Certificate {
            name: name.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Certificate) {
        self.checks.extend(other.checks);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass() { "pass" } else { "FAIL" };
        writeln!(f, "{}: {verdict}", self.name)?;
        for c in &self.checks {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            writeln!(f, "  [{mark}] {} ({})", c.name, c.detail)?;
        }
        Ok(())
    }
}
