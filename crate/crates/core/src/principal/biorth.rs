use crate::canonical::{product, LeftCanonical, RightCanonical};
use crate::certificate::{Certificate, Check};
use crate::error::{Error, Result};
use crate::jet::{unimodular_inverse, LaurentPart, MatrixJet};
use crate::matrix::Mat;
use crate::scalar::{Scalar, Tolerance};

use super::{require_order, scaled_outer};

/// Right and left canonical matrices with `Δ⁻¹VTYΔ⁻¹ ≐ Δ⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiorthogonalPair<S> {
    pub y: MatrixJet<S>,
    pub v: MatrixJet<S>,
    pub m: Vec<usize>,
    pub certificate: Certificate,
}

impl<S: Scalar> BiorthogonalPair<S> {
    /// Certifies the pair; fails with [`Error::NotBiorthogonal`] otherwise.
    /// Too short a truncation is reported as such rather than as a failure.
    pub fn new(t: &MatrixJet<S>, y: MatrixJet<S>, v: MatrixJet<S>, m: Vec<usize>, tol: &Tolerance) -> Result<Self> {
        let s = m.first().copied().unwrap_or(0);
        require_order(t.order().min(y.order()).min(v.order()), s, "biorthogonality")?;
        let certificate = biorthogonality_certificate(t, &y, &v, &m, tol);
        if !certificate.pass() {
            return Err(Error::NotBiorthogonal);
        }
        Ok(BiorthogonalPair { y, v, m, certificate })
    }

    /// `V` reduced modulo `ΔH`: row `i` keeps only `x^0 … x^{m_i - 1}`.
    pub fn normalized_v(&self) -> MatrixJet<S> {
        self.v.truncate_rows(&self.m)
    }
}

/// Both forms of the biorthogonality condition:
/// `(VTY)_{ik} ≡ δ_{ik} x^{m_k} (mod x^{m_i + m_k})`, and
/// `(VTY)⁻¹ ≐ Δ⁻¹`, checked as `Δ⁻¹((VTYΔ⁻¹)⁻¹ - I) ≐ 0`.
pub fn biorthogonality_certificate<S: Scalar>(
    t: &MatrixJet<S>,
    y: &MatrixJet<S>,
    v: &MatrixJet<S>,
    m: &[usize],
    tol: &Tolerance,
) -> Certificate {
    let mut cert = Certificate::new("biorthogonality");
    let r = m.len();
    let s = m.first().copied().unwrap_or(0);
    let scale = MatrixJet::product_scale(&[v, t, y], 2 * s);
    let vty = match product(v, t).and_then(|vt| product(&vt, y)) {
        Ok(p) => p,
        Err(e) => {
            cert.push(Check::flag("V T Y", false, e.to_string()));
            return cert;
        }
    };
    if vty.shape() != (r, r) {
        cert.push(Check::flag(
            "V T Y",
            false,
            format!("shape {:?}, expected {r}x{r}", vty.shape()),
        ));
        return cert;
    }
    if let Err(e) = require_order(vty.order(), s, "biorthogonality") {
        cert.push(Check::flag("truncation", false, e.to_string()));
        return cert;
    }

    let mut worst = 0.0_f64;
    let mut bad = None;
    for i in 0..r {
        for k in 0..r {
            for q in 0..m[i] + m[k] {
                let mut x = vty.coeff(q)[(i, k)].clone();
                if i == k && q == m[k] {
                    x = x - S::one();
                }
                worst = worst.max(x.magnitude());
                if bad.is_none() && !x.is_negligible(tol, scale) {
                    bad = Some((i, k, q));
                }
            }
        }
    }
    cert.push(Check::new(
        "Δ⁻¹VTYΔ⁻¹ ≐ Δ⁻¹",
        bad.is_none(),
        worst,
        match bad {
            None => format!("max residual {worst:.3e}"),
            Some((i, k, q)) => format!("entry ({}, {}) power {q}", i + 1, k + 1),
        },
    ));

    // δ(G⁻¹) ≈ G⁻¹ δG G⁻¹, with δG at the scale of V T Y
    let inverse_form = vty.divide_columns(m).and_then(|g| {
        let g_inv = unimodular_inverse(&g, tol)?;
        let scale = scale * MatrixJet::product_scale(&[&g_inv, &g_inv], s);
        Ok((g_inv.sub(&MatrixJet::identity(r, g.order()))?, scale))
    });
    match inverse_form {
        Ok((h, scale)) => {
            let mut worst = 0.0_f64;
            let mut pass = true;
            for (i, &mi) in m.iter().enumerate() {
                for q in 0..mi {
                    let row = h.coeff(q).select_rows([i]);
                    worst = worst.max(row.max_magnitude());
                    pass &= row.is_negligible(tol, scale);
                }
            }
            cert.push(Check::new(
                "(VTY)⁻¹ ≐ Δ⁻¹",
                pass,
                worst,
                format!("max residual {worst:.3e}"),
            ));
        }
        Err(e) => cert.push(Check::flag("(VTY)⁻¹ ≐ Δ⁻¹", false, e.to_string())),
    }
    cert
}

/// The unique `V` with rows of degree `< m_i` such that `(Y, V)` is a
/// biorthogonal pair, from one linear solve.
///
/// Unknowns are the coefficients `v_i^p`, `p < m_i`. Equations: row `i` of
/// `VT` vanishes to order `m_i`, and `(VTY)_{ik} - δ_{ik} x^{m_k}` vanishes
/// to order `m_i + m_k`.
pub fn biorthogonal_left<S: Scalar>(
    t: &MatrixJet<S>,
    y: &RightCanonical<S>,
    tol: &Tolerance,
) -> Result<LeftCanonical<S>> {
    let m = &y.m;
    let n = t.rows();
    let r = m.len();
    let s = m.first().copied().unwrap_or(0);
    let w = product(t, &y.y)?;
    require_order(w.order(), s, "biorthogonal left matrix")?;

    let mut offsets = Vec::with_capacity(r);
    let mut unknowns = 0;
    for &mi in m {
        offsets.push(unknowns);
        unknowns += mi * n;
    }
    let var = |i: usize, p: usize, c: usize| offsets[i] + p * n + c;

    let mut rows: Vec<(Vec<S>, S)> = Vec::new();
    for i in 0..r {
        for q in 0..m[i] {
            for col in 0..n {
                let mut eq = vec![S::zero(); unknowns];
                for p in 0..=q {
                    let tq = t.coeff(q - p);
                    for c in 0..n {
                        eq[var(i, p, c)] = tq[(c, col)].clone();
                    }
                }
                rows.push((eq, S::zero()));
            }
        }
        for k in 0..r {
            for q in 0..m[i] + m[k] {
                let mut eq = vec![S::zero(); unknowns];
                for p in 0..=q.min(m[i] - 1) {
                    let wq = w.coeff(q - p);
                    for c in 0..n {
                        eq[var(i, p, c)] = wq[(c, k)].clone();
                    }
                }
                let rhs = if i == k && q == m[k] { S::one() } else { S::zero() };
                rows.push((eq, rhs));
            }
        }
    }
    let a = Mat::from_rows(rows.iter().map(|(eq, _)| eq.clone()).collect());
    let b = Mat::column_vector(rows.into_iter().map(|(_, rhs)| rhs).collect());
    let x = a.solve(&b, tol).map_err(|_| Error::NotBiorthogonal)?;
    if a.rank(tol) != unknowns {
        return Err(Error::CrossCheck("biorthogonal left matrix is not unique".into()));
    }

    let mut coeffs = vec![Mat::zeros(r, n); t.order() + 1];
    for i in 0..r {
        for p in 0..m[i] {
            for c in 0..n {
                coeffs[p][(i, c)] = x[(var(i, p, c), 0)].clone();
            }
        }
    }
    Ok(LeftCanonical {
        v: MatrixJet::new(coeffs)?,
        m: m.clone(),
    })
}

/// Builds `V` by peeling off the leading coefficient of
/// `T⁻¹ - YΔ⁻¹V` one pole order at a time, given the principal part of
/// `T⁻¹` (for instance from the oracle). Each leading coefficient lies in
/// the span of the first `ℓ_j` columns of `Y(λ₀)`.
pub fn biorthogonal_left_descent<S: Scalar>(
    y: &RightCanonical<S>,
    target: &LaurentPart<S>,
    tol: &Tolerance,
) -> Result<LeftCanonical<S>> {
    let m = &y.m;
    let (n, r) = y.y.shape();
    let cols = target.shape().1;
    let order = y.y.order();
    let y0 = y.y.value();
    let mut v = MatrixJet::zeros(r, cols, order);
    let mut last = usize::MAX;
    loop {
        let current = scaled_outer(&y.y, m, &v, tol)?;
        let diff = difference(target, &current, tol)?;
        let j = diff.pole_order();
        if j == 0 {
            break;
        }
        if j >= last {
            return Err(Error::CrossCheck(format!("descent stalled at pole order {j}")));
        }
        last = j;
        let lj = m.iter().filter(|&&mi| mi >= j).count();
        let lead = y0.select_columns(0..lj);
        let coef = lead
            .solve(&diff.coefficient(j), tol)
            .map_err(|_| Error::CrossCheck(format!("leading coefficient at order {j} outside Y(λ₀)")))?;
        let mut step = vec![Mat::zeros(r, cols); order + 1];
        for i in 0..lj {
            let shift = m[i] - j;
            if shift > order {
                continue;
            }
            for c in 0..cols {
                step[shift][(i, c)] = coef[(i, c)].clone();
            }
        }
        v = v.add(&MatrixJet::new(step)?)?;
    }
    debug_assert_eq!(n, y0.rows());
    Ok(LeftCanonical {
        v: v.truncate_rows(m),
        m: m.clone(),
    })
}

fn difference<S: Scalar>(a: &LaurentPart<S>, b: &LaurentPart<S>, tol: &Tolerance) -> Result<LaurentPart<S>> {
    let s = a.pole_order().max(b.pole_order());
    let (rows, cols) = a.shape();
    let by_power = (1..=s)
        .map(|j| a.coefficient(j).sub(&b.coefficient(j)))
        .collect::<Result<Vec<_>>>()?;
    LaurentPart::from_by_power(rows, cols, by_power, tol)
}

/// `Ŷ = Y (Δ⁻¹VTY)⁻¹`, a right canonical matrix biorthogonal to `V`. Its
/// truncation order is `N - s`.
pub fn biorthogonal_right<S: Scalar>(
    t: &MatrixJet<S>,
    y: &RightCanonical<S>,
    v: &LeftCanonical<S>,
    tol: &Tolerance,
) -> Result<RightCanonical<S>> {
    if y.m != v.m {
        return Err(Error::InvalidMultiplicities);
    }
    let m = &y.m;
    let s = m.first().copied().unwrap_or(0);
    let vty = product(&product(&v.v, t)?, &y.y)?;
    require_order(vty.order(), s, "biorthogonal right matrix")?;
    let g = unimodular_inverse(&vty.divide_rows(m)?, tol)?;
    let yy = y.y.truncate(g.order());
    Ok(RightCanonical {
        y: yy.mul(&g)?,
        m: m.clone(),
    })
}
