//! Local Smith form `U_L T U_R = diag(x^{m_1}, …, x^{m_n})` over the jet
//! ring, by pivoted elimination.

use crate::certificate::{Certificate, Check};
use crate::error::{Error, Result};
use crate::jet::{Jet, MatrixJet, Valuation};
use crate::scalar::{Scalar, Tolerance};
use crate::structure::analyze;

#[derive(Debug, Clone, PartialEq)]
pub struct SmithFactorization<S> {
    pub left: MatrixJet<S>,
    pub right: MatrixJet<S>,
    pub left_inv: MatrixJet<S>,
    pub right_inv: MatrixJet<S>,
    pub d: MatrixJet<S>,
    /// All `n` exponents, nonincreasing; trailing zeros for unit entries.
    pub m: Vec<usize>,
}

impl<S: Scalar> SmithFactorization<S> {
    /// The positive exponents.
    pub fn partial_multiplicities(&self) -> Vec<usize> {
        self.m.iter().copied().filter(|&k| k > 0).collect()
    }

    pub fn order(&self) -> usize {
        self.d.order()
    }
}

/// `diag(x^{m_1}, …, x^{m_r})` at truncation `order`.
pub fn delta_of<S: Scalar>(m: &[usize], order: usize) -> Result<MatrixJet<S>> {
    if m.contains(&0) || m.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidMultiplicities);
    }
    let r = m.len();
    let mut d = MatrixJet::zeros(r, r, order);
    for (i, &k) in m.iter().enumerate() {
        d.set_entry(i, i, &Jet::monomial(k, order))?;
    }
    Ok(d)
}

/// Dense grid of jets with the elementary operations the elimination needs.
struct Grid<S> {
    e: Vec<Vec<Jet<S>>>,
}

impl<S: Scalar> Grid<S> {
    fn from(m: &MatrixJet<S>) -> Self {
        Grid {
            e: (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m.entry(i, j)).collect())
                .collect(),
        }
    }

    fn identity(n: usize, order: usize) -> Self {
        Self::from(&MatrixJet::identity(n, order))
    }

    fn to_jet(&self) -> MatrixJet<S> {
        MatrixJet::from_entries(&self.e).expect("uniform grid")
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.e.swap(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for row in &mut self.e {
            row.swap(a, b);
        }
    }

    /// `row_dst -= c * row_src`.
    fn row_axpy(&mut self, dst: usize, src: usize, c: &Jet<S>) -> Result<()> {
        for j in 0..self.e[dst].len() {
            let v = self.e[dst][j].sub(&c.mul(&self.e[src][j])?)?;
            self.e[dst][j] = v;
        }
        Ok(())
    }

    /// `col_dst -= c * col_src`.
    fn col_axpy(&mut self, dst: usize, src: usize, c: &Jet<S>) -> Result<()> {
        for row in &mut self.e {
            let v = row[dst].sub(&row[src].mul(c)?)?;
            row[dst] = v;
        }
        Ok(())
    }

    fn scale_row(&mut self, i: usize, c: &Jet<S>) -> Result<()> {
        for j in 0..self.e[i].len() {
            self.e[i][j] = self.e[i][j].mul(c)?;
        }
        Ok(())
    }

    fn scale_col(&mut self, j: usize, c: &Jet<S>) -> Result<()> {
        for row in &mut self.e {
            row[j] = row[j].mul(c)?;
        }
        Ok(())
    }
}

/// Computes the local Smith form of a square jet.
///
/// At step `k` the trailing block entry of least vanishing order is moved
/// to `(k, k)`, ties going to the smallest `(row, col)` for exact scalars and
/// to the largest leading coefficient otherwise; its row and column are
/// cleared with jet multipliers and the pivot is normalized to `x^p`. The
/// exponents come out nondecreasing and are reversed at the end.
pub fn local_smith<S: Scalar>(t: &MatrixJet<S>, tol: &Tolerance) -> Result<SmithFactorization<S>> {
    if !t.is_square() {
        return Err(Error::NotSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let n = t.rows();
    let order = t.order();
    let scale = t.float_scale();

    let mut w = Grid::from(t);
    let mut ul = Grid::identity(n, order);
    let mut ul_inv = Grid::identity(n, order);
    let mut ur = Grid::identity(n, order);
    let mut ur_inv = Grid::identity(n, order);
    let mut exps = Vec::with_capacity(n);

    for k in 0..n {
        let mut best: Option<(usize, f64, usize, usize)> = None;
        for i in k..n {
            for j in k..n {
                if let Valuation::Finite(v) = w.e[i][j].valuation_with_scale(tol, scale) {
                    let size = if S::EXACT { 0.0 } else { w.e[i][j].coeff(v).magnitude() };
                    if best.is_none_or(|(bv, bs, _, _)| v < bv || (v == bv && size > bs)) {
                        best = Some((v, size, i, j));
                    }
                }
            }
        }
        let Some((p, _, pi, pj)) = best else {
            return Err(Error::InsufficientTruncation {
                context: "local Smith form (trailing block vanishes to the truncation order)",
                needed: order + 1,
                available: order,
            });
        };
        if pi != k {
            w.swap_rows(k, pi);
            ul.swap_rows(k, pi);
            ul_inv.swap_cols(k, pi);
        }
        if pj != k {
            w.swap_cols(k, pj);
            ur.swap_cols(k, pj);
            ur_inv.swap_rows(k, pj);
        }

        // pivot = x^p u with u a unit known to order N - p
        let u = w.e[k][k].shift_down(p)?;
        let u_inv = u.reciprocal()?;
        let multiplier = |a: &Jet<S>| -> Result<Jet<S>> { Ok(a.shift_down(p)?.mul(&u_inv)?.pad(order)) };

        for i in k + 1..n {
            if w.e[i][k].is_zero() {
                continue;
            }
            let c = multiplier(&w.e[i][k])?;
            w.row_axpy(i, k, &c)?;
            ul.row_axpy(i, k, &c)?;
            ul_inv.col_axpy(k, i, &c.neg())?;
            w.e[i][k] = Jet::zero(order);
        }
        for j in k + 1..n {
            if w.e[k][j].is_zero() {
                continue;
            }
            let c = multiplier(&w.e[k][j])?;
            w.col_axpy(j, k, &c)?;
            ur.col_axpy(j, k, &c)?;
            ur_inv.row_axpy(k, j, &c.neg())?;
            w.e[k][j] = Jet::zero(order);
        }

        let norm = u_inv.pad(order);
        let norm_inv = norm.reciprocal()?;
        w.scale_row(k, &norm)?;
        ul.scale_row(k, &norm)?;
        ul_inv.scale_col(k, &norm_inv)?;
        w.e[k][k] = Jet::monomial(p, order);
        exps.push(p);
    }

    // reverse to make the exponents nonincreasing
    let rev: Vec<usize> = (0..n).rev().collect();
    let ul = ul.to_jet().select_rows(rev.clone());
    let ul_inv = ul_inv.to_jet().select_columns(rev.clone());
    let ur = ur.to_jet().select_columns(rev.clone());
    let ur_inv = ur_inv.to_jet().select_rows(rev);
    exps.reverse();
    let mut d = MatrixJet::zeros(n, n, order);
    for (i, &p) in exps.iter().enumerate() {
        d.set_entry(i, i, &Jet::monomial(p, order))?;
    }
    Ok(SmithFactorization {
        left: ul,
        right: ur,
        left_inv: ul_inv,
        right_inv: ur_inv,
        d,
        m: exps,
    })
}

/// Checks `U_L T U_R = D`, unimodularity and inverse pairs, the ordering of
/// `m`, and agreement with the subspace-chain multiplicities.
pub fn verify_smith<S: Scalar>(t: &MatrixJet<S>, f: &SmithFactorization<S>, tol: &Tolerance) -> Certificate {
    let mut cert = Certificate::new("smith");
    let scale = MatrixJet::product_scale(&[&f.left, t, &f.right], usize::MAX);
    let n = t.rows();
    match f.left.mul(t).and_then(|x| x.mul(&f.right)).and_then(|x| x.sub(&f.d)) {
        Ok(res) => cert.push(Check::zero_jet("U_L T U_R = D", &res, tol, scale)),
        Err(e) => cert.push(Check::flag("U_L T U_R = D", false, e.to_string())),
    }
    cert.push(Check::flag(
        "U_L unimodular",
        f.left.is_unimodular(tol),
        "constant term rank",
    ));
    cert.push(Check::flag(
        "U_R unimodular",
        f.right.is_unimodular(tol),
        "constant term rank",
    ));
    for (name, a, b) in [
        ("U_L inverse pair", &f.left, &f.left_inv),
        ("U_R inverse pair", &f.right, &f.right_inv),
    ] {
        match a.mul(b).and_then(|p| p.sub(&MatrixJet::identity(n, a.order()))) {
            Ok(res) => cert.push(Check::zero_jet(
                name,
                &res,
                tol,
                MatrixJet::product_scale(&[a, b], usize::MAX),
            )),
            Err(e) => cert.push(Check::flag(name, false, e.to_string())),
        }
    }
    let ordered = f.m.len() == n && f.m.windows(2).all(|w| w[0] >= w[1]);
    cert.push(Check::flag("exponents nonincreasing", ordered, format!("{:?}", f.m)));
    match analyze(t, tol) {
        Ok(st) => {
            let same = f.partial_multiplicities() == st.m;
            cert.push(Check::flag(
                "exponents match subspace chain",
                same,
                format!("smith {:?}, chain {:?}", f.partial_multiplicities(), st.m),
            ));
        }
        Err(e) => cert.push(Check::flag("exponents match subspace chain", false, e.to_string())),
    }
    cert
}
