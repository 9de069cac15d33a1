//! Sign certificates for self-adjoint block operator matrices.
//!
//! Positive definiteness of `B = (B_ij)` on `H_1 × … × H_n` is decided by a
//! recursive bisection system of first-kind Schur operators
//! ([`schur_first`]); nonnegativity by sequential elimination with
//! second-kind Schur operators ([`schur_second`]). Closed-form paths for
//! three blocks and for bidiagonal structure live in [`explicit`], and
//! [`extremum`] applies both criteria to Hessians of functionals on product
//! spaces. Every decision is returned as a certificate listing the checks
//! that produced it.
//!
//! All numerics are generic over [`Scalar`] (`f64`, `f32`); the aliases at
//! the crate root fix the scalar to `f64`.

pub mod block;
pub mod error;
pub mod explicit;
pub mod extremum;
pub mod linalg;
pub mod oracle;
pub mod scalar;
pub mod schur_first;
pub mod schur_second;

pub use block::{BlockMatrixFile, BlockPartition};
pub use error::{Error, Result};
pub use explicit::{
    check_nn_3x3, check_pd_3x3, check_pd_bidiagonal, gen_schur_first_3, inverse_sub_blocks_3, inverse_sub_blocks_3_alt,
    is_bidiagonal, InverseSubBlocks,
};
pub use extremum::{
    check_necessary_3var, check_sufficient_2var, check_sufficient_3var, classify_critical_point, classify_hessian,
    example_l2_functional, example_l2_hessian, gradient_fd, hessian_fd, Classification, Reason,
};
pub use linalg::{invert, is_nn_leaf, is_pd_leaf, sym_eig_min, LeafCheck};
pub use oracle::{compare_with_oracle, random_bidiagonal, random_self_adjoint, standard_instance, sweep, Rng};
pub use scalar::Scalar;
pub use schur_first::{
    check_pd, count_inequalities, enumerate_chains, recursion_depth, schur_first, CertNode, CheckMode, NodeVerdict,
    PdVerdict, SchurChain, SchurStep,
};
pub use schur_second::{check_nn, check_nn_2x2, energy_identity_residual, schur_second, NnVerdict, Ordering};

pub type DenseMatrix = linalg::DenseMatrix<f64>;
pub type DenseMatrixF32 = linalg::DenseMatrix<f32>;
pub type BlockMatrix = block::BlockMatrix<f64>;
pub type BlockMatrixF32 = block::BlockMatrix<f32>;
pub type Tolerances = linalg::Tolerances<f64>;
pub type TolerancesF32 = linalg::Tolerances<f32>;
pub type SignCertificate = schur_first::SignCertificate<f64>;
pub type NnCertificate = schur_second::NnCertificate<f64>;
pub type ExtremumReport = extremum::ExtremumReport<f64>;
pub type ProductFunctional = extremum::ProductFunctional<f64>;
