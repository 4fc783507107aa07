//! Dense complex linear algebra: factorizations, numerical rank, subspaces and gauge norms.

pub mod dense;
pub mod eigh;
pub mod gauge;
pub mod matrix;
pub mod svd;
pub mod tolerance;

pub use dense::{
    expm, hermitian_fn, intersection_basis, intersection_dim, inverse, orthonormal_basis,
    orthonormal_complement_basis, principal_cosines, projector_onto, psd_pinv_sqrt, psd_sqrt, unitary_defect, Lu,
};
pub use eigh::{eigh, EighResult};
pub use gauge::{gauge_norm, op_norm, GaugeNorm};
pub use matrix::{ComplexMatrix, C64, ONE, ZERO};
pub use svd::{rank, singular_values, svd, SvdResult};
pub use tolerance::ToleranceConfig;
