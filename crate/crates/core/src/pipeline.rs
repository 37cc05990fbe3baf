//! Runs every construction on one input and collects the results together
//! with their certificates.

use crate::canonical::{
    column_span_check, decomposition_checks, left_canonical, right_canonical, validate_left, validate_right,
    LeftCanonical, RightCanonical,
};
use crate::certificate::{Certificate, Check};
use crate::error::{Error, Result};
use crate::jet::MatrixJet;
use crate::oracle::{compare, laurent_inverse, Comparison, LaurentExpansion};
use crate::principal::{
    biorthogonal_left, biorthogonal_right, principal_keldysh, principal_main, principal_smith, realization,
    BiorthogonalPair, MainVariant, PrincipalPart, Realization, Route,
};
use crate::scalar::{Scalar, Tolerance};
use crate::smith::{local_smith, verify_smith, SmithFactorization};
use crate::structure::{analyze, LocalStructure};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub tol: Tolerance,
    pub main_variant: MainVariant,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: Tolerance::default(),
            main_variant: MainVariant::Auto,
        }
    }
}

/// Everything computed for one input.
#[derive(Debug, Clone)]
pub struct Analysis<S> {
    pub structure: LocalStructure<S>,
    pub smith: SmithFactorization<S>,
    /// Canonical matrices from the adapted basis (not biorthogonal in general).
    pub right: RightCanonical<S>,
    pub left: LeftCanonical<S>,
    /// `(Y, V̂)` with `V̂` solved for biorthogonality against `Y`.
    pub keldysh_pair: BiorthogonalPair<S>,
    /// `(Ŷ, V)` with `Ŷ = Y (Δ⁻¹VTY)⁻¹`; drives the realization.
    pub realization_pair: BiorthogonalPair<S>,
    pub realization: Realization<S>,
    pub parts: Vec<PrincipalPart<S>>,
    pub certificates: Vec<Certificate>,
}

impl<S: Scalar> Analysis<S> {
    pub fn part(&self, route: Route) -> Option<&PrincipalPart<S>> {
        self.parts.iter().find(|p| p.route == route)
    }

    pub fn all_certificates_pass(&self) -> bool {
        self.certificates.iter().all(Certificate::pass)
    }
}

/// Structure and Smith form, cross-checked against each other.
pub fn structure_and_smith<S: Scalar>(
    t: &MatrixJet<S>,
    tol: &Tolerance,
) -> Result<(LocalStructure<S>, SmithFactorization<S>)> {
    let st = analyze(t, tol)?;
    let f = local_smith(t, tol)?;
    if f.partial_multiplicities() != st.m {
        return Err(Error::CrossCheck(format!(
            "Smith exponents {:?} differ from subspace-chain multiplicities {:?}",
            f.partial_multiplicities(),
            st.m
        )));
    }
    Ok((st, f))
}

pub fn run<S: Scalar>(t: &MatrixJet<S>, opts: &Options) -> Result<Analysis<S>> {
    let tol = &opts.tol;
    let (structure, smith) = structure_and_smith(t, tol)?;
    let mut certificates = vec![verify_smith(t, &smith, tol)];

    let right = right_canonical(t, &structure, tol)?;
    let left = left_canonical(t, &structure, tol)?;
    let m = structure.m.clone();
    let mut canon = validate_right(t, &right.y, &m, tol);
    canon.extend(validate_left(t, &left.v, &m, tol));
    canon.push(column_span_check(&right.y, &structure, tol));
    canon.name = "canonical".into();
    certificates.push(canon);
    certificates.push(decomposition_checks(t, &right.y, &left.v, &m, tol));

    let v_hat = biorthogonal_left(t, &right, tol)?;
    let keldysh_pair = BiorthogonalPair::new(t, right.y.clone(), v_hat.v, m.clone(), tol)?;
    let y_hat = biorthogonal_right(t, &right, &left, tol)?;
    let realization_pair = BiorthogonalPair::new(t, y_hat.y, left.v.clone(), m.clone(), tol)?;
    let real = realization(&realization_pair)?;

    let parts = vec![
        principal_smith(&smith, tol)?,
        principal_keldysh(&keldysh_pair, tol)?,
        principal_main(t, &right.y, &left.v, &m, opts.main_variant, tol)?,
        real.reconstruct(tol)?,
    ];
    certificates.push(real.certificate(&parts[0].part, tol));
    certificates.push(agreement(&parts, tol));

    Ok(Analysis {
        structure,
        smith,
        right,
        left,
        keldysh_pair,
        realization_pair,
        realization: real,
        parts,
        certificates,
    })
}

/// A single route, with the certificates that route relies on.
pub fn principal_by<S: Scalar>(
    t: &MatrixJet<S>,
    route: Route,
    opts: &Options,
) -> Result<(PrincipalPart<S>, Vec<Certificate>)> {
    let tol = &opts.tol;
    if route == Route::Oracle {
        let oracle = laurent_inverse(t, 0, tol)?;
        let mut cert = Certificate::new("oracle");
        cert.push(oracle.self_check(t, tol));
        let part = PrincipalPart {
            route,
            part: oracle.principal_part(),
        };
        return Ok((part, vec![cert]));
    }
    let (structure, smith) = structure_and_smith(t, tol)?;
    if route == Route::Smith {
        let cert = verify_smith(t, &smith, tol);
        return Ok((principal_smith(&smith, tol)?, vec![cert]));
    }
    let right = right_canonical(t, &structure, tol)?;
    match route {
        Route::Keldysh => {
            let v_hat = biorthogonal_left(t, &right, tol)?;
            let pair = BiorthogonalPair::new(t, right.y, v_hat.v, structure.m.clone(), tol)?;
            let cert = pair.certificate.clone();
            Ok((principal_keldysh(&pair, tol)?, vec![cert]))
        }
        Route::Main => {
            let left = left_canonical(t, &structure, tol)?;
            let cert = decomposition_checks(t, &right.y, &left.v, &structure.m, tol);
            let part = principal_main(t, &right.y, &left.v, &structure.m, opts.main_variant, tol)?;
            Ok((part, vec![cert]))
        }
        _ => {
            let left = left_canonical(t, &structure, tol)?;
            let y_hat = biorthogonal_right(t, &right, &left, tol)?;
            let pair = BiorthogonalPair::new(t, y_hat.y, left.v, structure.m.clone(), tol)?;
            let real = realization(&pair)?;
            let part = real.reconstruct(tol)?;
            let cert = real.certificate(&part.part, tol);
            Ok((part, vec![pair.certificate, cert]))
        }
    }
}

/// All principal parts equal the first one.
pub fn agreement<S: Scalar>(parts: &[PrincipalPart<S>], tol: &Tolerance) -> Certificate {
    let mut cert = Certificate::new("route agreement");
    let Some(first) = parts.first() else {
        return cert;
    };
    let scale = first.part.max_magnitude();
    for other in &parts[1..] {
        let name = format!("{} = {}", other.route, first.route);
        if other.part.pole_order() != first.part.pole_order() {
            cert.push(Check::flag(
                name,
                false,
                format!(
                    "pole orders {} and {}",
                    other.part.pole_order(),
                    first.part.pole_order()
                ),
            ));
            continue;
        }
        let mut worst = 0.0_f64;
        let mut pass = true;
        for j in 1..=first.part.pole_order() {
            let diff = other
                .part
                .coefficient(j)
                .sub(&first.part.coefficient(j))
                .expect("same shape");
            worst = worst.max(diff.max_magnitude());
            pass &= diff.is_negligible(tol, scale);
        }
        cert.push(Check::new(name, pass, worst, format!("max deviation {worst:.3e}")));
    }
    cert
}

/// Oracle expansion, per-route comparisons, and the combined certificate.
pub type OracleCheck<S> = (LaurentExpansion<S>, Vec<(Route, Comparison)>, Certificate);

/// Oracle expansion with `regular_order` regular terms, its self-check, and
/// a comparison of each principal part against it.
pub fn verify_against_oracle<S: Scalar>(
    t: &MatrixJet<S>,
    parts: &[PrincipalPart<S>],
    regular_order: usize,
    tol: &Tolerance,
) -> Result<OracleCheck<S>> {
    let oracle = laurent_inverse(t, regular_order, tol)?;
    let mut cert = Certificate::new("oracle");
    cert.push(oracle.self_check(t, tol));
    let mut comparisons = Vec::with_capacity(parts.len());
    for p in parts {
        match compare(&p.part, &oracle, tol) {
            Ok(c) => {
                cert.push(Check::new(
                    format!("{} matches oracle", p.route),
                    c.pass,
                    c.max_deviation,
                    c.to_string(),
                ));
                comparisons.push((p.route, c));
            }
            Err(e) => cert.push(Check::flag(format!("{} matches oracle", p.route), false, e.to_string())),
        }
    }
    Ok((oracle, comparisons, cert))
}
