use crate::error::{Error, Result};
use crate::jet::MatrixJet;
use crate::matrix::Mat;
use crate::scalar::{Scalar, Tolerance};
use crate::structure::{analyze, compute_lj};

/// The equivalent first-order tests for a semisimple root, with
/// `Z_L`, `Z_R` the left and right kernel bases of `T(λ₀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemisimpleWitness<S> {
    pub semisimple: bool,
    pub z_left: Mat<S>,
    pub z_right: Mat<S>,
    /// `Z_L T'(λ₀) Z_R`.
    pub pencil: Mat<S>,
    /// `ℂⁿ = im T(λ₀) ⊕ T'(λ₀)(ker T(λ₀))`.
    pub direct_sum: bool,
    /// `ker T(λ₀) ∩ ker T'(λ₀) = 0` and `im T(λ₀) ∩ T'(λ₀)(ker T(λ₀)) = 0`.
    pub trivial_intersections: bool,
    pub pencil_nonsingular: bool,
    /// `L_2 = {0}`.
    pub l2_trivial: bool,
}

pub fn is_semisimple<S: Scalar>(t: &MatrixJet<S>, tol: &Tolerance) -> Result<SemisimpleWitness<S>> {
    if !t.is_square() {
        return Err(Error::NotSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    if t.order() < 1 {
        return Err(Error::InsufficientTruncation {
            context: "semisimplicity test",
            needed: 1,
            available: 0,
        });
    }
    let n = t.rows();
    let t0 = t.coeff(0);
    let t1 = t.coeff(1);
    let z_right = t0.nullspace(tol);
    let z_left = t0.left_nullspace(tol);
    let r = z_right.cols();
    if r == 0 {
        return Err(Error::NotSingular);
    }
    let pencil = z_left.mul(t1)?.mul(&z_right)?;
    let pencil_nonsingular = pencil.rank(tol) == r;

    let rank_t0 = t0.rank(tol);
    let image = t1.mul(&z_right)?;
    let rank_image = image.rank(tol);
    let joint = t0.hstack(&image)?.rank(tol);
    let direct_sum = joint == n && rank_t0 + rank_image == n;
    let kernels_meet = t0.vstack(t1)?.rank(tol) < n;
    let images_meet = rank_t0 + rank_image > joint;
    let trivial_intersections = !kernels_meet && !images_meet;
    let l2_trivial = compute_lj(t, 2, tol)?.cols() == 0;

    let verdicts = [pencil_nonsingular, direct_sum, trivial_intersections, l2_trivial];
    if verdicts.iter().any(|&v| v != pencil_nonsingular) {
        return Err(Error::CrossCheck(format!(
            "semisimplicity tests disagree: pencil {pencil_nonsingular}, direct sum {direct_sum}, \
             intersections {trivial_intersections}, L_2 {l2_trivial}"
        )));
    }
    Ok(SemisimpleWitness {
        semisimple: pencil_nonsingular,
        z_left,
        z_right,
        pencil,
        direct_sum,
        trivial_intersections,
        pencil_nonsingular,
        l2_trivial,
    })
}

/// `Res(T⁻¹; λ₀) = Z_R (Z_L T'(λ₀) Z_R)⁻¹ Z_L` at a semisimple root.
pub fn residue_semisimple<S: Scalar>(t: &MatrixJet<S>, tol: &Tolerance) -> Result<Mat<S>> {
    let w = is_semisimple(t, tol)?;
    if !w.semisimple {
        let largest = analyze(t, tol).map(|st| st.s).unwrap_or(0);
        return Err(Error::NotSemisimple { largest });
    }
    residue_from_bases(t, &w.z_left, &w.z_right, tol)
}

/// The residue formula for caller-chosen kernel bases.
pub fn residue_from_bases<S: Scalar>(
    t: &MatrixJet<S>,
    z_left: &Mat<S>,
    z_right: &Mat<S>,
    tol: &Tolerance,
) -> Result<Mat<S>> {
    let pencil = z_left.mul(t.coeff(1))?.mul(z_right)?;
    let inv = pencil.inverse(tol).ok_or_else(|| {
        let largest = analyze(t, tol).map(|st| st.s).unwrap_or(0);
        Error::NotSemisimple { largest }
    })?;
    z_right.mul(&inv)?.mul(z_left)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn running_example_is_not_semisimple() {
        let t = running_example(5);
        let w = is_semisimple(&t, &tol()).unwrap();
        assert!(!w.semisimple);
        assert!(!w.l2_trivial);
        assert_eq!(residue_semisimple(&t, &tol()), Err(Error::NotSemisimple { largest: 2 }));
    }

    #[test]
    fn simple_diagonal() {
        let t = simple(3);
        let w = is_semisimple(&t, &tol()).unwrap();
        assert!(w.semisimple);
        assert_eq!(w.pencil, Mat::from_i64(&[&[1]]));
        assert_eq!(
            residue_semisimple(&t, &tol()).unwrap(),
            Mat::from_i64(&[&[1, 0], &[0, 0]])
        );
    }

    #[test]
    fn double_semisimple() {
        let t = poly(
            vec![
                Mat::from_i64(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 1]]),
                Mat::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]]),
            ],
            3,
        );
        let w = is_semisimple(&t, &tol()).unwrap();
        assert!(w.semisimple);
        assert_eq!(w.pencil, Mat::identity(2));
    }

    #[test]
    fn residue_does_not_depend_on_bases() {
        let t = poly(
            vec![
                Mat::from_i64(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 0]]),
                Mat::from_i64(&[&[2, 0, 1], &[0, 1, 0], &[1, 0, 3]]),
            ],
            3,
        );
        let w = is_semisimple(&t, &tol()).unwrap();
        assert!(w.semisimple);
        let base = residue_semisimple(&t, &tol()).unwrap();
        let ml = Mat::from_i64(&[&[2, 1], &[1, 1]]);
        let mr = Mat::from_i64(&[&[1, 3], &[0, -1]]);
        let zl = ml.mul(&w.z_left).unwrap();
        let zr = w.z_right.mul(&mr).unwrap();
        assert_eq!(residue_from_bases(&t, &zl, &zr, &tol()).unwrap(), base);
    }
}
