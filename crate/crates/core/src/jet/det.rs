//! Determinant and adjugate of matrix jets.
//!
//! The truncated jet ring has zero divisors (`x · x^N = 0`), so elimination
//! schemes that divide by pivots are unavailable. Berkowitz's algorithm
//! computes the characteristic polynomial with ring operations only; the
//! adjugate then follows from Cayley–Hamilton:
//! `adj(M) = (-1)^{n+1} (M^{n-1} + c_1 M^{n-2} + … + c_{n-1} I)` where
//! `det(tI - M) = t^n + c_1 t^{n-1} + … + c_n`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{Jet, MatrixJet};

/// Coefficients `[1, c_1, …, c_n]` of `det(tI - M)`.
fn characteristic_polynomial<S: Scalar>(m: &MatrixJet<S>) -> Result<Vec<Jet<S>>> {
    let n = m.rows();
    let order = m.order();
    let mut poly = vec![Jet::one(order)];
    for size in 1..=n {
        let last = size - 1;
        let diag = m.entry(last, last);
        let mut toeplitz = vec![Jet::one(order), diag.neg()];
        if size > 1 {
            let lead = m.select_rows(0..last).select_columns(0..last);
            let col = m.select_rows(0..last).select_columns([last]);
            let row = m.select_rows([last]).select_columns(0..last);
            let mut v = col;
            for _ in 0..last {
                toeplitz.push(row.mul(&v)?.entry(0, 0).neg());
                v = lead.mul(&v)?;
            }
        }
        let mut next = Vec::with_capacity(size + 1);
        for i in 0..=size {
            let mut acc = Jet::zero(order);
            for (j, c) in poly.iter().enumerate().take(i + 1) {
                acc = acc.add(&toeplitz[i - j].mul(c)?)?;
            }
            next.push(acc);
        }
        poly = next;
    }
    Ok(poly)
}

fn check_square<S: Scalar>(m: &MatrixJet<S>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(())
}

pub fn det_jet<S: Scalar>(m: &MatrixJet<S>) -> Result<Jet<S>> {
    check_square(m)?;
    let n = m.rows();
    let poly = characteristic_polynomial(m)?;
    let cn = poly[n].clone();
    Ok(if n.is_multiple_of(2) { cn } else { cn.neg() })
}

/// `(det M, adj M)`, satisfying `adj(M) M = M adj(M) = det(M) I` up to the
/// truncation order.
pub fn det_adj_jet<S: Scalar>(m: &MatrixJet<S>) -> Result<(Jet<S>, MatrixJet<S>)> {
    check_square(m)?;
    let n = m.rows();
    let order = m.order();
    let poly = characteristic_polynomial(m)?;
    let cn = poly[n].clone();
    let det = if n.is_multiple_of(2) { cn } else { cn.neg() };

    let mut q = MatrixJet::identity(n, order);
    for c in poly.iter().take(n).skip(1) {
        q = q.mul(m)?.add(&scalar_identity(c, n)?)?;
    }
    let adj = if n % 2 == 1 { q } else { q.neg() };
    Ok((det, adj))
}

fn scalar_identity<S: Scalar>(c: &Jet<S>, n: usize) -> Result<MatrixJet<S>> {
    let mut out = MatrixJet::zeros(n, n, c.order());
    for i in 0..n {
        out.set_entry(i, i, c)?;
    }
    Ok(out)
}
