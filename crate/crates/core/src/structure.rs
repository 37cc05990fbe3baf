//! Local zero structure: the subspace chain `L_1 ⊇ L_2 ⊇ …`, its
//! dimensions, the partial multiplicities and an adapted basis of the kernel.
//!
//! `L_j` is the set of values `y(λ₀)` of functions with `T y = O(x^j)`. It is
//! computed as the projection onto the first block of the kernel of the block
//! lower-triangular Toeplitz matrix built from `T_0, …, T_{j-1}`.

use crate::error::{Error, Result};
use crate::jet::{det_jet, MatrixJet, Valuation};
use crate::matrix::Mat;
use crate::scalar::{Scalar, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct LocalStructure<S> {
    /// Geometric multiplicity, `dim ker T(λ₀)`.
    pub r: usize,
    /// Pole order of the inverse, `m_1`.
    pub s: usize,
    /// `[ℓ_1, …, ℓ_s]`.
    pub ell: Vec<usize>,
    /// Partial multiplicities `m_1 ≥ … ≥ m_r ≥ 1`.
    pub m: Vec<usize>,
    pub alg_mult: usize,
    /// Column bases of `L_1, …, L_s`.
    pub lj_bases: Vec<Mat<S>>,
}

/// Basis of `ker T(λ₀)` ordered so that the first `ℓ_j` vectors span `L_j`,
/// with one solution chain per vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedBasis<S> {
    /// `n x r`; column `i` is `y_i^0`.
    pub vectors: Mat<S>,
    pub m: Vec<usize>,
    /// `chains[i] = [y_i^1, …, y_i^{m_i - 1}]`, each an `n x 1` column.
    pub chains: Vec<Vec<Mat<S>>>,
}

/// `m_i = #{ j : p_j ≥ i }` for `i = 1, 2, …`.
pub fn conjugate_partition(p: &[usize]) -> Vec<usize> {
    let top = p.iter().copied().max().unwrap_or(0);
    (1..=top).map(|i| p.iter().filter(|&&x| x >= i).count()).collect()
}

/// The `jn x jn` matrix whose block row `k` is `[T_k, T_{k-1}, …, T_0, 0, …]`.
pub fn toeplitz_system<S: Scalar>(t: &MatrixJet<S>, j: usize) -> Result<Mat<S>> {
    assert!(j >= 1, "toeplitz system needs at least one block");
    if j - 1 > t.order() {
        return Err(Error::InsufficientTruncation {
            context: "root function equations",
            needed: j - 1,
            available: t.order(),
        });
    }
    let (rows, cols) = t.shape();
    let mut out = Mat::zeros(j * rows, j * cols);
    for k in 0..j {
        for p in 0..=k {
            let block = t.coeff(k - p);
            for a in 0..rows {
                for b in 0..cols {
                    out[(k * rows + a, p * cols + b)] = block[(a, b)].clone();
                }
            }
        }
    }
    Ok(out)
}

/// Canonical column basis of `L_j`.
pub fn compute_lj<S: Scalar>(t: &MatrixJet<S>, j: usize, tol: &Tolerance) -> Result<Mat<S>> {
    let n = t.cols();
    let kernel = toeplitz_system(t, j)?.nullspace(tol);
    Ok(kernel.select_rows(0..n).column_basis(tol))
}

/// Bases of `L_1, L_2, …` up to and including the first trivial one (or `L_limit`).
fn subspace_chain<S: Scalar>(t: &MatrixJet<S>, limit: usize, tol: &Tolerance) -> Result<Vec<Mat<S>>> {
    let mut bases: Vec<Mat<S>> = Vec::new();
    for j in 1..=limit {
        let lj = compute_lj(t, j, tol)?;
        if let Some(prev) = bases.last() {
            if !prev.column_span_contains(&lj, tol) {
                return Err(Error::CrossCheck(format!("L_{j} is not contained in L_{}", j - 1)));
            }
        }
        let empty = lj.cols() == 0;
        bases.push(lj);
        if empty {
            break;
        }
    }
    Ok(bases)
}

pub fn analyze<S: Scalar>(t: &MatrixJet<S>, tol: &Tolerance) -> Result<LocalStructure<S>> {
    if !t.is_square() {
        return Err(Error::NotSquare {
            rows: t.rows(),
            cols: t.cols(),
        });
    }
    let order = t.order();
    let kappa = match det_jet(t)?.valuation(tol) {
        Valuation::BeyondTruncation => {
            return Err(Error::NotInvertibleWithinTruncation { order });
        }
        Valuation::Finite(0) => return Err(Error::NotSingular),
        Valuation::Finite(k) => k,
    };
    if kappa >= order {
        return Err(Error::InsufficientTruncation {
            context: "local structure (determinant zero order must be below the truncation order)",
            needed: kappa + 1,
            available: order,
        });
    }

    // s ≤ κ, so L_{κ+1} is trivial and its Toeplitz system needs T_0..T_κ.
    let mut lj_bases = subspace_chain(t, kappa + 1, tol)?;
    if lj_bases.last().is_some_and(|b| b.cols() > 0) {
        return Err(Error::CrossCheck(format!(
            "L_{} is nontrivial although det vanishes to order {kappa}",
            kappa + 1
        )));
    }
    lj_bases.pop();
    let ell: Vec<usize> = lj_bases.iter().map(Mat::cols).collect();
    let m = conjugate_partition(&ell);
    let alg_mult: usize = ell.iter().sum();
    if alg_mult != kappa {
        return Err(Error::CrossCheck(format!(
            "sum of partial multiplicities {alg_mult} differs from determinant zero order {kappa}"
        )));
    }
    Ok(LocalStructure {
        r: ell.first().copied().unwrap_or(0),
        s: ell.len(),
        ell,
        m,
        alg_mult,
        lj_bases,
    })
}

impl<S: Scalar> LocalStructure<S> {
    /// Subspace bases of the transposed problem, i.e. of the left versions
    /// of `L_j`. Fails if the dimensions disagree with `self`.
    pub fn transposed_bases(&self, t: &MatrixJet<S>, tol: &Tolerance) -> Result<Vec<Mat<S>>> {
        let mut bases = subspace_chain(&t.transpose(), self.s + 1, tol)?;
        bases.truncate(self.s);
        let ell: Vec<usize> = bases.iter().map(Mat::cols).collect();
        if ell != self.ell {
            return Err(Error::CrossCheck(format!(
                "left subspace dimensions {ell:?} differ from right ones {:?}",
                self.ell
            )));
        }
        Ok(bases)
    }
}

/// Builds a basis from `L_s` outward and solves the root equations for each
/// vector, with `y^0` fixed and free unknowns set to zero.
pub fn adapted_basis<S: Scalar>(t: &MatrixJet<S>, st: &LocalStructure<S>, tol: &Tolerance) -> Result<AdaptedBasis<S>> {
    adapted_from_chain(t, &st.lj_bases, tol)
}

pub(crate) fn adapted_from_chain<S: Scalar>(
    t: &MatrixJet<S>,
    lj_bases: &[Mat<S>],
    tol: &Tolerance,
) -> Result<AdaptedBasis<S>> {
    let n = t.cols();
    let mut vectors = Mat::zeros(n, 0);
    let mut m = Vec::new();
    for (level, basis) in lj_bases.iter().enumerate().rev() {
        for c in 0..basis.cols() {
            let candidate = vectors.hstack(&basis.select_columns([c]))?;
            if candidate.rank(tol) > vectors.cols() {
                vectors = candidate;
                m.push(level + 1);
            }
        }
        if vectors.cols() != basis.cols() {
            return Err(Error::CrossCheck(format!(
                "adapted basis has {} vectors at level {}, expected {}",
                vectors.cols(),
                level + 1,
                basis.cols()
            )));
        }
    }

    let mut chains = Vec::with_capacity(m.len());
    for (i, &mi) in m.iter().enumerate() {
        chains.push(solve_chain(t, &vectors.select_columns([i]), mi, tol)?);
    }
    Ok(AdaptedBasis { vectors, m, chains })
}

/// `[y^1, …, y^{k-1}]` with `Σ_{p≤q} T_p y^{q-p} = 0` for `q < k`.
fn solve_chain<S: Scalar>(t: &MatrixJet<S>, y0: &Mat<S>, k: usize, tol: &Tolerance) -> Result<Vec<Mat<S>>> {
    let n = t.cols();
    if k <= 1 {
        return Ok(Vec::new());
    }
    let sys = toeplitz_system(t, k)?;
    let head = sys.select_columns(0..n);
    let rest = sys.select_columns(n..k * n);
    let rhs = head.mul(y0)?.neg();
    let z = rest.solve(&rhs, tol).map_err(|_| {
        Error::CrossCheck(format!(
            "no root function chain of length {k} through a vector of L_{k}"
        ))
    })?;
    Ok((1..k).map(|p| z.select_rows((p - 1) * n..p * n)).collect())
}

impl<S: Scalar> AdaptedBasis<S> {
    /// Column `i` is the polynomial `Σ_p x^p y_i^p`, at truncation `order`.
    pub fn to_matrix_jet(&self, order: usize) -> MatrixJet<S> {
        let n = self.vectors.rows();
        let r = self.vectors.cols();
        let mut coeffs = vec![Mat::zeros(n, r); order + 1];
        for i in 0..r {
            for a in 0..n {
                coeffs[0][(a, i)] = self.vectors[(a, i)].clone();
            }
            for (p, y) in self.chains[i].iter().enumerate() {
                if p + 1 > order {
                    break;
                }
                for a in 0..n {
                    coeffs[p + 1][(a, i)] = y[(a, 0)].clone();
                }
            }
        }
        MatrixJet::new(coeffs).expect("uniform shapes")
    }
}
