//! Seeded test instances `T = A · diag(x^{m_1}, …, x^{m_r}, 1, …, 1) · B`
//! with `A`, `B` random polynomial matrices of constant determinant `±1`,
//! so the partial multiplicities at `x = 0` are known by construction.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jet::MatrixJet;
use crate::matrix::Mat;
use crate::scalar::Scalar;

type Q = BigRational;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedInstance {
    pub n: usize,
    /// Planted partial multiplicities, nonincreasing and positive.
    pub m: Vec<usize>,
    /// Coefficients of `T` in powers of `x`.
    pub coeffs: Vec<Mat<Q>>,
    pub left: Vec<Mat<Q>>,
    pub right: Vec<Mat<Q>>,
    /// Truncation order large enough for every construction (the realization
    /// pair needs `3s - 1`) and the oracle with two regular terms.
    pub truncation: usize,
}

impl PlantedInstance {
    pub fn jet<S: Scalar>(&self, order: usize) -> MatrixJet<S> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.map_into(|q| S::from_rational(q)))
            .collect();
        MatrixJet::from_polynomial(coeffs, order).expect("uniform shapes")
    }

    pub fn alg_mult(&self) -> usize {
        self.m.iter().sum()
    }

    pub fn pole_order(&self) -> usize {
        self.m.first().copied().unwrap_or(0)
    }
}

/// Builds a planted instance; `m` may be given in any order.
pub fn planted_instance(n: usize, m: &[usize], seed: u64) -> Result<PlantedInstance> {
    if n == 0 || m.is_empty() || m.len() > n || m.contains(&0) {
        return Err(Error::InvalidMultiplicities);
    }
    let mut m = m.to_vec();
    m.sort_unstable_by(|a, b| b.cmp(a));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let left = random_unimodular(n, &mut rng);
    let right = random_unimodular(n, &mut rng);

    let top = m[0];
    let mut d = vec![Mat::zeros(n, n); top + 1];
    for i in 0..n {
        let p = m.get(i).copied().unwrap_or(0);
        d[p][(i, i)] = Q::from_integer(1.into());
    }
    let coeffs = trim(poly_mul(&poly_mul(&left, &d), &right));
    let kappa: usize = m.iter().sum();
    let truncation = (kappa + top + 2).max(3 * top - 1);
    Ok(PlantedInstance {
        n,
        m,
        coeffs,
        left,
        right,
        truncation,
    })
}

/// `P · L · U` with `L` (`U`) unit lower (upper) triangular with entries of
/// degree at most one, and `P` a signed permutation.
fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> Vec<Mat<Q>> {
    let mut lower = vec![Mat::identity(n), Mat::zeros(n, n)];
    let mut upper = vec![Mat::identity(n), Mat::zeros(n, n)];
    for i in 0..n {
        for j in 0..n {
            for k in 0..2 {
                if i > j {
                    lower[k][(i, j)] = small(rng);
                } else if i < j {
                    upper[k][(i, j)] = small(rng);
                }
            }
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut p = Mat::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        p[(i, j)] = Q::from_integer(sign.into());
    }
    trim(poly_mul(&[p], &poly_mul(&lower, &upper)))
}

fn small(rng: &mut ChaCha8Rng) -> Q {
    const CHOICES: [(i64, i64); 8] = [(0, 1), (0, 1), (1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2)];
    let (num, den) = CHOICES[rng.gen_range(0..CHOICES.len())];
    Q::new(BigInt::from(num), BigInt::from(den))
}

fn poly_mul(a: &[Mat<Q>], b: &[Mat<Q>]) -> Vec<Mat<Q>> {
    let (rows, cols) = (a[0].rows(), b[0].cols());
    let mut out = vec![Mat::zeros(rows, cols); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y).expect("conformal")).expect("same shape");
        }
    }
    out
}

fn trim(mut p: Vec<Mat<Q>>) -> Vec<Mat<Q>> {
    while p.len() > 1 && p.last().is_some_and(Mat::is_zero) {
        p.pop();
    }
    p
}
