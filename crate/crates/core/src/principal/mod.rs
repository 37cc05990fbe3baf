//! The principal part of `T⁻¹` by four independent constructions: from a
//! local Smith form, from a biorthogonal canonical pair (Keldysh), from an
//! arbitrary canonical pair, and from a nilpotent state-space realization.
//! Also the semisimple residue formula.

mod biorth;
mod realization;
mod semisimple;

pub use biorth::{
    biorthogonal_left, biorthogonal_left_descent, biorthogonal_right, biorthogonality_certificate, BiorthogonalPair,
};
pub use realization::{realization, Realization};
pub use semisimple::{is_semisimple, residue_from_bases, residue_semisimple, SemisimpleWitness};

use std::fmt;

use crate::canonical::product;
use crate::error::{Error, Result};
use crate::jet::{unimodular_inverse, LaurentPart, MatrixJet};
use crate::matrix::Mat;
use crate::scalar::{Scalar, Tolerance};
use crate::smith::SmithFactorization;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Smith,
    Keldysh,
    Main,
    Realization,
    Oracle,
}

impl Route {
    pub const ALL: [Route; 4] = [Route::Smith, Route::Keldysh, Route::Main, Route::Realization];

    pub fn name(self) -> &'static str {
        match self {
            Route::Smith => "smith",
            Route::Keldysh => "keldysh",
            Route::Main => "main",
            Route::Realization => "realization",
            Route::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A principal part of `T⁻¹` tagged with the construction that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalPart<S> {
    pub route: Route,
    pub part: LaurentPart<S>,
}

/// Which inverse the closed formula uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MainVariant {
    /// `YΔ⁻¹ (VTYΔ⁻¹)⁻¹ V`.
    Alt,
    /// `Y (Δ⁻¹VTY)⁻¹ Δ⁻¹V`.
    Mirrored,
    /// `Alt` on exact scalars; on floats whichever inverse has the better
    /// conditioned constant term.
    Auto,
}

/// The principal part depends on `T` modulo `x^{2s}`.
pub(crate) fn require_order(available: usize, s: usize, context: &'static str) -> Result<()> {
    let needed = (2 * s).saturating_sub(1);
    if available < needed {
        return Err(Error::InsufficientTruncation {
            context,
            needed,
            available,
        });
    }
    Ok(())
}

/// Principal part of `Σ_i y_i x^{-m_i} z_i` for an `n x r` jet `y` and an
/// `r x n'` jet `z`: `R_j = Σ_i Σ_{a+b = m_i - j} y_i[a] z_i[b]`.
pub fn scaled_outer<S: Scalar>(
    y: &MatrixJet<S>,
    m: &[usize],
    z: &MatrixJet<S>,
    tol: &Tolerance,
) -> Result<LaurentPart<S>> {
    let (n, r) = y.shape();
    let cols = z.cols();
    if z.rows() != r || m.len() != r {
        return Err(Error::DimensionMismatch {
            op: "principal part of Y Δ⁻¹ Z",
            left: y.shape(),
            right: z.shape(),
        });
    }
    let s = m.iter().copied().max().unwrap_or(0);
    let have = y.order().min(z.order());
    if s > 0 && have < s - 1 {
        return Err(Error::InsufficientTruncation {
            context: "principal part of Y Δ⁻¹ Z",
            needed: s - 1,
            available: have,
        });
    }
    let mut by_power: Vec<Mat<S>> = vec![Mat::zeros(n, cols); s];
    for (i, &mi) in m.iter().enumerate() {
        for j in 1..=mi {
            let total = mi - j;
            let acc = &mut by_power[j - 1];
            for a in 0..=total {
                let ya = y.coeff(a);
                let zb = z.coeff(total - a);
                for p in 0..n {
                    if ya[(p, i)].is_zero() {
                        continue;
                    }
                    for q in 0..cols {
                        let v = acc[(p, q)].clone() + ya[(p, i)].clone() * zb[(i, q)].clone();
                        acc[(p, q)] = v;
                    }
                }
            }
        }
    }
    LaurentPart::from_by_power(n, cols, by_power, tol)
}

/// `U_R D⁻¹ U_L` restricted to the singular block: with `U_L T U_R = D`,
/// `Y = U_R[:, :r]` and `V = U_L[:r, :]` satisfy `VTY = Δ` and
/// `T⁻¹ ≐ YΔ⁻¹V`.
pub fn principal_smith<S: Scalar>(f: &SmithFactorization<S>, tol: &Tolerance) -> Result<PrincipalPart<S>> {
    let m = f.partial_multiplicities();
    let r = m.len();
    require_order(
        f.order(),
        m.first().copied().unwrap_or(0),
        "principal part from the Smith form",
    )?;
    let y = f.right.select_columns(0..r);
    let v = f.left.select_rows(0..r);
    Ok(PrincipalPart {
        route: Route::Smith,
        part: scaled_outer(&y, &m, &v, tol)?,
    })
}

/// `YΔ⁻¹V` for a biorthogonal pair.
pub fn principal_keldysh<S: Scalar>(pair: &BiorthogonalPair<S>, tol: &Tolerance) -> Result<PrincipalPart<S>> {
    if !pair.certificate.pass() {
        return Err(Error::NotBiorthogonal);
    }
    Ok(PrincipalPart {
        route: Route::Keldysh,
        part: scaled_outer(&pair.y, &pair.m, &pair.v, tol)?,
    })
}

/// Closed formula valid for any right and left canonical matrices, with the
/// unimodular inverse needed only to order `s - 1`.
pub fn principal_main<S: Scalar>(
    t: &MatrixJet<S>,
    y: &MatrixJet<S>,
    v: &MatrixJet<S>,
    m: &[usize],
    variant: MainVariant,
    tol: &Tolerance,
) -> Result<PrincipalPart<S>> {
    let s = m.first().copied().unwrap_or(0);
    if s == 0 {
        return Ok(PrincipalPart {
            route: Route::Main,
            part: LaurentPart::zero(t.rows(), t.cols()),
        });
    }
    let vty = product(&product(v, t)?, y)?;
    require_order(vty.order(), s, "closed principal-part formula")?;
    let keep = s - 1;
    let alt = || -> Result<MatrixJet<S>> { unimodular_inverse(&vty.divide_columns(m)?, tol) };
    let mirrored = || -> Result<MatrixJet<S>> { unimodular_inverse(&vty.divide_rows(m)?, tol) };
    let variant = match variant {
        MainVariant::Auto if S::EXACT => MainVariant::Alt,
        MainVariant::Auto => {
            let ca = condition(vty.divide_columns(m)?.value(), tol);
            let cm = condition(vty.divide_rows(m)?.value(), tol);
            if cm < ca {
                MainVariant::Mirrored
            } else {
                MainVariant::Alt
            }
        }
        other => other,
    };
    let y = y.truncate(keep);
    let v = v.truncate(keep);
    let part = match variant {
        MainVariant::Mirrored => {
            let h = mirrored()?.truncate(keep);
            scaled_outer(&y.mul(&h)?, m, &v, tol)?
        }
        _ => {
            let h = alt()?.truncate(keep);
            scaled_outer(&y, m, &h.mul(&v)?, tol)?
        }
    };
    Ok(PrincipalPart {
        route: Route::Main,
        part,
    })
}

/// `‖A‖ ‖A⁻¹‖` in the max-entry norm; infinite when singular.
fn condition<S: Scalar>(a: &Mat<S>, tol: &Tolerance) -> f64 {
    match a.inverse(tol) {
        Some(inv) => a.max_magnitude() * inv.max_magnitude(),
        None => f64::INFINITY,
    }
}
