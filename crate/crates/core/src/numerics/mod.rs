//! Complex linear algebra foundation: matrices, SVD-based factorizations
//! and the tolerance policy every other module uses for discrete decisions.

mod matrix;
mod svd;
mod tolerance;

pub use matrix::{axpy, dot, norm, scale_vec, CMatrix, C64, I, ONE, ZERO};
pub use svd::{
    normalize_phase, nullspace, operator_norm, orthonormalize, rank, singular_values, svd, Svd,
};
pub(crate) use svd::unit;
pub use tolerance::Tolerance;
