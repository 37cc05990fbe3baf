use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("insufficient truncation for {context}: need order {needed}, have {available}")]
    InsufficientTruncation {
        context: &'static str,
        needed: usize,
        available: usize,
    },

    #[error("matrix is not singular at the expansion point")]
    NotSingular,

    #[error("determinant vanishes identically up to truncation order {order}")]
    NotInvertibleWithinTruncation { order: usize },

    #[error("constant term is singular; matrix jet is not unimodular")]
    SingularConstantTerm,

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("not a root function: {0}")]
    NotARootFunction(&'static str),

    #[error("constant term has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("root is not semisimple (largest partial multiplicity {largest})")]
    NotSemisimple { largest: usize },

    #[error("partial multiplicities must be positive and nonincreasing")]
    InvalidMultiplicities,

    #[error("canonical pair fails the biorthogonality condition")]
    NotBiorthogonal,

    #[error("pole order mismatch: expected {expected}, found {found}")]
    PoleOrderMismatch { expected: usize, found: usize },

    #[error("linear system has no solution")]
    Inconsistent,

    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
