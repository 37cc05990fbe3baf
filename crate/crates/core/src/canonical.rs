//! Root functions, canonical matrices and the direct-sum decompositions
//! they induce.

use crate::certificate::{Certificate, Check};
use crate::error::{Error, Result};
use crate::jet::{unimodular_inverse, MatrixJet, Valuation};
use crate::matrix::Mat;
use crate::scalar::{Scalar, Tolerance};
use crate::structure::{adapted_basis, adapted_from_chain, LocalStructure};

/// `n x r` matrix whose columns form a canonical system of root functions.
#[derive(Debug, Clone, PartialEq)]
pub struct RightCanonical<S> {
    pub y: MatrixJet<S>,
    pub m: Vec<usize>,
}

/// `r x n` matrix whose rows form a canonical system of left root functions.
#[derive(Debug, Clone, PartialEq)]
pub struct LeftCanonical<S> {
    pub v: MatrixJet<S>,
    pub m: Vec<usize>,
}

/// Truncates both jets to their common order.
pub(crate) fn align<S: Scalar>(a: &MatrixJet<S>, b: &MatrixJet<S>) -> (MatrixJet<S>, MatrixJet<S>) {
    let k = a.order().min(b.order());
    (a.truncate(k), b.truncate(k))
}

/// `T Y` at the common truncation order of the two factors.
pub(crate) fn product<S: Scalar>(a: &MatrixJet<S>, b: &MatrixJet<S>) -> Result<MatrixJet<S>> {
    let (a, b) = align(a, b);
    a.mul(&b)
}

/// Multiplicity `ν(y)`: the vanishing order of `T y`.
pub fn multiplicity<S: Scalar>(t: &MatrixJet<S>, y: &MatrixJet<S>, tol: &Tolerance) -> Result<usize> {
    if y.cols() != 1 || y.rows() != t.cols() {
        return Err(Error::DimensionMismatch {
            op: "root function",
            left: t.shape(),
            right: y.shape(),
        });
    }
    if y.value().is_negligible(tol, y.float_scale()) {
        return Err(Error::NotARootFunction("value at the point vanishes"));
    }
    let ty = product(t, y)?;
    match ty.valuation_with_scale(tol, MatrixJet::product_scale(&[t, y], usize::MAX)) {
        Valuation::Finite(0) => Err(Error::NotARootFunction("value is not in the kernel")),
        Valuation::Finite(k) => Ok(k),
        Valuation::BeyondTruncation => Err(Error::InsufficientTruncation {
            context: "root function multiplicity",
            needed: ty.order() + 1,
            available: ty.order(),
        }),
    }
}

/// Polynomial canonical matrix assembled from the adapted basis and its
/// root-equation chains.
pub fn right_canonical<S: Scalar>(
    t: &MatrixJet<S>,
    st: &LocalStructure<S>,
    tol: &Tolerance,
) -> Result<RightCanonical<S>> {
    let basis = adapted_basis(t, st, tol)?;
    let y = basis.to_matrix_jet(t.order());
    check_multiplicities(t, &y, &basis.m, tol)?;
    Ok(RightCanonical { y, m: basis.m })
}

/// The right construction applied to `Tᵀ`, transposed back.
pub fn left_canonical<S: Scalar>(
    t: &MatrixJet<S>,
    st: &LocalStructure<S>,
    tol: &Tolerance,
) -> Result<LeftCanonical<S>> {
    let tt = t.transpose();
    let bases = st.transposed_bases(t, tol)?;
    let basis = adapted_from_chain(&tt, &bases, tol)?;
    let y = basis.to_matrix_jet(t.order());
    check_multiplicities(&tt, &y, &basis.m, tol)?;
    Ok(LeftCanonical {
        v: y.transpose(),
        m: basis.m,
    })
}

fn check_multiplicities<S: Scalar>(t: &MatrixJet<S>, y: &MatrixJet<S>, m: &[usize], tol: &Tolerance) -> Result<()> {
    for (i, &mi) in m.iter().enumerate() {
        let nu = multiplicity(t, &y.column(i), tol)?;
        if nu != mi {
            return Err(Error::CrossCheck(format!(
                "root function {i} has multiplicity {nu}, expected {mi}"
            )));
        }
    }
    Ok(())
}

/// Checks that `y` is a right canonical matrix for multiplicities `m`:
/// full column rank at the point, column `i` of `T Y` vanishing to order at
/// least `m_i`, and `Σ ν(y_i) = Σ m_i`.
pub fn validate_right<S: Scalar>(t: &MatrixJet<S>, y: &MatrixJet<S>, m: &[usize], tol: &Tolerance) -> Certificate {
    let mut cert = Certificate::new("right canonical");
    let r = m.len();
    if y.shape() != (t.cols(), r) {
        cert.push(Check::flag(
            "shape",
            false,
            format!("expected {}x{r}, got {:?}", t.cols(), y.shape()),
        ));
        return cert;
    }
    let scale = MatrixJet::product_scale(&[t, y], usize::MAX);
    let rank = y.value().rank(tol);
    cert.push(Check::flag(
        "full column rank at the point",
        rank == r,
        format!("rank {rank} of {r}"),
    ));
    let ty = match product(t, y) {
        Ok(p) => p,
        Err(e) => {
            cert.push(Check::flag("T Y", false, e.to_string()));
            return cert;
        }
    };
    let nus = ty.column_valuations(tol, scale);
    let divisible = nus.iter().zip(m).all(|(nu, &mi)| nu.at_least(mi));
    cert.push(Check::flag(
        "T Y Δ⁻¹ holomorphic",
        divisible,
        format!("column orders {nus:?}, required {m:?}"),
    ));
    let sum_m: usize = m.iter().sum();
    let sum_nu = nus.iter().map(|v| v.finite()).sum::<Option<usize>>();
    cert.push(Check::flag(
        "Σν = Σm",
        sum_nu == Some(sum_m),
        format!("Σν = {sum_nu:?}, Σm = {sum_m}"),
    ));
    cert
}

/// Mirror of [`validate_right`] for an `r x n` matrix `v`.
pub fn validate_left<S: Scalar>(t: &MatrixJet<S>, v: &MatrixJet<S>, m: &[usize], tol: &Tolerance) -> Certificate {
    let mut cert = validate_right(&t.transpose(), &v.transpose(), m, tol);
    cert.name = "left canonical".into();
    cert
}

/// For every `j`, the first `ℓ_j` columns of `Y(λ₀)` span `L_j`.
pub fn column_span_check<S: Scalar>(y: &MatrixJet<S>, st: &LocalStructure<S>, tol: &Tolerance) -> Check {
    let y0 = y.value();
    for (j, (basis, &lj)) in st.lj_bases.iter().zip(&st.ell).enumerate() {
        let lead = y0.select_columns(0..lj);
        let same = lead.rank(tol) == lj && lead.column_span_contains(basis, tol);
        if !same {
            return Check::flag("leading columns span L_j", false, format!("fails at j = {}", j + 1));
        }
    }
    Check::flag("leading columns span L_j", true, format!("{} levels", st.s))
}

/// Unimodular `U` with `M U = [I 0]` for `M` of full row rank at the point.
///
/// `M(λ₀)` is completed to a nonsingular matrix by unit rows, the rows are
/// stacked under `M`, and the resulting unimodular jet is inverted.
pub fn unimodular_completion<S: Scalar>(m: &MatrixJet<S>, tol: &Tolerance) -> Result<MatrixJet<S>> {
    let (r, n) = m.shape();
    let rank = m.value().rank(tol);
    if rank != r {
        return Err(Error::RankDeficient { rank, expected: r });
    }
    let mut stacked = m.clone();
    let mut value = m.value().clone();
    for k in 0..n {
        if value.rows() == n {
            break;
        }
        let mut e = Mat::zeros(1, n);
        e[(0, k)] = S::one();
        let candidate = value.vstack(&e)?;
        if candidate.rank(tol) == candidate.rows() {
            value = candidate;
            stacked = stacked.vstack(&MatrixJet::constant(e, m.order()))?;
        }
    }
    unimodular_inverse(&stacked, tol)
}

/// Rank certificates for `ℂⁿ = im T(λ₀) ⊕ im (TYΔ⁻¹)(λ₀)`,
/// `ℂⁿ = ker T(λ₀) ⊕ ker (Δ⁻¹VT)(λ₀)`, and unimodularity of `Δ⁻¹VTY` and
/// `VTYΔ⁻¹`.
pub fn decomposition_checks<S: Scalar>(
    t: &MatrixJet<S>,
    y: &MatrixJet<S>,
    v: &MatrixJet<S>,
    m: &[usize],
    tol: &Tolerance,
) -> Certificate {
    let mut cert = Certificate::new("decompositions");
    let n = t.rows();
    let r = m.len();
    let t0 = t.value();
    let rank_t0 = t0.rank(tol);

    let right = product(t, y).and_then(|ty| ty.divide_columns(m));
    match right {
        Ok(w) => {
            let w0 = w.value();
            let sum = t0.hstack(w0).map(|s| s.rank(tol)).unwrap_or(0);
            let pass = rank_t0 + w0.rank(tol) == n && sum == n;
            cert.push(Check::flag(
                "im T(λ₀) ⊕ im (TYΔ⁻¹)(λ₀) = ℂⁿ",
                pass,
                format!("ranks {} + {} with span {sum} of {n}", rank_t0, w0.rank(tol)),
            ));
        }
        Err(e) => cert.push(Check::flag("im T(λ₀) ⊕ im (TYΔ⁻¹)(λ₀) = ℂⁿ", false, e.to_string())),
    }

    let left = product(v, t).and_then(|vt| vt.divide_rows(m));
    match left {
        Ok(w) => {
            let w0 = w.value();
            let ker_w = n - w0.rank(tol);
            let joint = t0.vstack(w0).map(|s| s.rank(tol)).unwrap_or(0);
            let pass = (n - rank_t0) + ker_w == n && joint == n;
            cert.push(Check::flag(
                "ker T(λ₀) ⊕ ker (Δ⁻¹VT)(λ₀) = ℂⁿ",
                pass,
                format!("kernel dims {} + {ker_w}, joint rank {joint} of {n}", n - rank_t0),
            ));
        }
        Err(e) => cert.push(Check::flag("ker T(λ₀) ⊕ ker (Δ⁻¹VT)(λ₀) = ℂⁿ", false, e.to_string())),
    }

    let vty = product(v, t).and_then(|vt| product(&vt, y));
    for (name, divided) in [
        ("Δ⁻¹VTY unimodular", vty.clone().and_then(|p| p.divide_rows(m))),
        ("VTYΔ⁻¹ unimodular", vty.and_then(|p| p.divide_columns(m))),
    ] {
        match divided {
            Ok(g) => {
                let rank = g.value().rank(tol);
                cert.push(Check::flag(
                    name,
                    rank == r,
                    format!("constant term rank {rank} of {r}"),
                ));
            }
            Err(e) => cert.push(Check::flag(name, false, e.to_string())),
        }
    }
    cert
}
