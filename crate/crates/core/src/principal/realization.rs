use crate::certificate::{Certificate, Check};
use crate::error::{Error, Result};
use crate::jet::LaurentPart;
use crate::matrix::Mat;
use crate::scalar::{Scalar, Tolerance};

use super::{BiorthogonalPair, PrincipalPart, Route};

/// Constant `(A, B, C)` with `C (xI - A)⁻¹ B` equal to the principal part of
/// `T⁻¹`; `A` is nilpotent.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization<S> {
    pub a: Mat<S>,
    pub b: Mat<S>,
    pub c: Mat<S>,
    pub m: Vec<usize>,
}

/// State basis `b_{i,j} = [YΔ⁻¹ x^{j-1} e_i]`, `1 ≤ j ≤ m_i`. Multiplication
/// by `x` shifts `b_{i,j}` to `b_{i,j+1}` (and `b_{i,m_i}` to zero), `B`
/// holds the coefficients of the normalized `V`, and `C` the residues of
/// the basis elements.
pub fn realization<S: Scalar>(pair: &BiorthogonalPair<S>) -> Result<Realization<S>> {
    if !pair.certificate.pass() {
        return Err(Error::NotBiorthogonal);
    }
    let m = &pair.m;
    let (n, _) = pair.y.shape();
    let cols = pair.v.cols();
    let s = m.first().copied().unwrap_or(0);
    if s > 0 && pair.y.order() < s - 1 {
        return Err(Error::InsufficientTruncation {
            context: "realization",
            needed: s - 1,
            available: pair.y.order(),
        });
    }
    let d: usize = m.iter().sum();
    let mut start = Vec::with_capacity(m.len());
    let mut acc = 0;
    for &mi in m {
        start.push(acc);
        acc += mi;
    }
    let v = pair.normalized_v();
    let mut a = Mat::zeros(d, d);
    let mut b = Mat::zeros(d, cols);
    let mut c = Mat::zeros(n, d);
    for (i, &mi) in m.iter().enumerate() {
        for j in 1..=mi {
            let idx = start[i] + j - 1;
            if j < mi {
                a[(idx + 1, idx)] = S::one();
            }
            let vp = v.coeff(j - 1);
            for q in 0..cols {
                b[(idx, q)] = vp[(i, q)].clone();
            }
            let yp = pair.y.coeff(mi - j);
            for p in 0..n {
                c[(p, idx)] = yp[(p, i)].clone();
            }
        }
    }
    Ok(Realization { a, b, c, m: m.clone() })
}

impl<S: Scalar> Realization<S> {
    pub fn state_dimension(&self) -> usize {
        self.a.rows()
    }

    /// `A^k`.
    pub fn a_power(&self, k: usize) -> Mat<S> {
        let mut p = Mat::identity(self.a.rows());
        for _ in 0..k {
            p = p.mul(&self.a).expect("square");
        }
        p
    }

    /// `Σ_j C A^{j-1} B x^{-j}`.
    pub fn reconstruct(&self, tol: &Tolerance) -> Result<PrincipalPart<S>> {
        let d = self.state_dimension();
        let mut by_power = Vec::with_capacity(d);
        let mut p = self.b.clone();
        for _ in 0..d {
            by_power.push(self.c.mul(&p)?);
            p = self.a.mul(&p)?;
        }
        Ok(PrincipalPart {
            route: Route::Realization,
            part: LaurentPart::from_by_power(self.c.rows(), self.b.cols(), by_power, tol)?,
        })
    }

    /// `A^s = 0`, `A^{s-1} ≠ 0`, and `C A^{j-1} B = R_j` against `expected`.
    pub fn certificate(&self, expected: &LaurentPart<S>, tol: &Tolerance) -> Certificate {
        let mut cert = Certificate::new("realization");
        let s = self.m.first().copied().unwrap_or(0);
        let scale = self
            .a
            .max_magnitude()
            .max(self.b.max_magnitude())
            .max(self.c.max_magnitude())
            .max(1.0);
        cert.push(Check::zero_matrix("A^s = 0", &self.a_power(s), tol, scale));
        if s > 0 {
            let below = self.a_power(s - 1);
            cert.push(Check::flag(
                "A^(s-1) ≠ 0",
                !below.is_negligible(tol, scale),
                format!("s = {s}"),
            ));
        }
        cert.push(Check::flag(
            "state dimension = Σm",
            self.state_dimension() == self.m.iter().sum::<usize>(),
            format!("d = {}", self.state_dimension()),
        ));
        let mut p = self.b.clone();
        for j in 1..=s.max(expected.pole_order()) {
            let cab = self.c.mul(&p).expect("conformal");
            let diff = cab.sub(&expected.coefficient(j)).expect("same shape");
            cert.push(Check::zero_matrix(
                format!("C A^{} B = R_{j}", j - 1),
                &diff,
                tol,
                scale,
            ));
            p = self.a.mul(&p).expect("conformal");
        }
        cert
    }
}
