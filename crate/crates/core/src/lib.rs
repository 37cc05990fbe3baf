//! Local zero structure of a holomorphic square matrix function `T(λ)` at a
//! point `λ₀`, and the pole structure of `T⁻¹` it determines.
//!
//! Inputs are [`MatrixJet`]s: truncated Taylor expansions in `x = λ - λ₀`
//! over an exact rational or floating-point [`Scalar`] field. From them the
//! crate computes partial multiplicities (by subspace dimensions and by a
//! local Smith factorization), canonical systems of root functions, and the
//! principal part of `T⁻¹` by several independent constructions, all of
//! which can be checked against an adjugate/determinant oracle.

pub mod canonical;
pub mod certificate;
pub mod error;
pub mod jet;
pub mod matrix;
pub mod oracle;
pub mod pipeline;
pub mod planted;
pub mod principal;
pub mod scalar;
pub mod smith;
pub mod structure;

pub use certificate::{Certificate, Check};
pub use error::{Error, Result};
pub use jet::{Jet, LaurentPart, MatrixJet, Valuation};
pub use matrix::Mat;
pub use scalar::{Scalar, Tolerance};
pub use smith::{delta_of, local_smith, verify_smith, SmithFactorization};
pub use structure::{
    adapted_basis, analyze, compute_lj, conjugate_partition, toeplitz_system, AdaptedBasis, LocalStructure,
};
