//! Dense real linear algebra: the numeric substrate for the Schur criteria and
//! the eigenvalue oracle they are checked against.

mod dense;
pub(crate) mod eigen;
mod inverse;
mod tolerances;

use serde::{Deserialize, Serialize};

pub use dense::DenseMatrix;
pub use inverse::{invert, invertibility_gate, InvertibilityGate};
pub use tolerances::Tolerances;

use crate::error::Result;
use crate::scalar::Scalar;

/// Smallest eigenvalue of `(M + Mᵀ)/2`.
///
/// Fails with `AsymmetricInput` when `‖M − Mᵀ‖/‖M‖ > sym_tol`.
pub fn sym_eig_min<T: Scalar>(m: &DenseMatrix<T>, tol: &Tolerances<T>) -> Result<T> {
    let sym = eigen::checked_symmetric(m, tol)?;
    if sym.rows() == 0 {
        return Ok(T::infinity());
    }
    let e = eigen::jacobi_eigen(&sym, false)?;
    Ok(e.values[0])
}

/// All eigenvalues of `(M + Mᵀ)/2`, ascending.
pub fn sym_eigenvalues<T: Scalar>(m: &DenseMatrix<T>, tol: &Tolerances<T>) -> Result<Vec<T>> {
    let sym = eigen::checked_symmetric(m, tol)?;
    Ok(eigen::jacobi_eigen(&sym, false)?.values)
}

/// Outcome of a single-block definiteness test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeafCheck<T> {
    pub verdict: bool,
    pub lambda_min: T,
}

/// `λ_min > pd_eps · max(1, ‖M‖_max)`.
pub fn is_pd_leaf<T: Scalar>(m: &DenseMatrix<T>, tol: &Tolerances<T>) -> Result<LeafCheck<T>> {
    let lambda_min = sym_eig_min(m, tol)?;
    Ok(LeafCheck {
        verdict: lambda_min > tol.pd_eps * m.scale_floor(),
        lambda_min,
    })
}

/// `λ_min ≥ −nn_tol · max(1, ‖M‖_max)`.
pub fn is_nn_leaf<T: Scalar>(m: &DenseMatrix<T>, tol: &Tolerances<T>) -> Result<LeafCheck<T>> {
    let lambda_min = sym_eig_min(m, tol)?;
    Ok(LeafCheck {
        verdict: lambda_min >= -(tol.nn_tol * m.scale_floor()),
        lambda_min,
    })
}

/// Unique PSD square root `V diag(√λ) Vᵀ` and its inverse, for a positive definite matrix.
pub(crate) fn spd_sqrt_pair<T: Scalar>(
    m: &DenseMatrix<T>,
    tol: &Tolerances<T>,
) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
    let sym = eigen::checked_symmetric(m, tol)?;
    let e = eigen::jacobi_eigen(&sym, true)?;
    if e.values.first().is_some_and(|&l| l <= tol.pd_eps * m.scale_floor()) {
        return Err(crate::error::Error::NotPositiveDefinite("matrix".into()));
    }
    let v = e.vectors.expect("vectors requested");
    let roots: Vec<T> = e.values.iter().map(|l| l.sqrt()).collect();
    let inv_roots: Vec<T> = roots.iter().map(|r| T::one() / *r).collect();
    let vt = v.transpose();
    let sqrt = v.multiply(&DenseMatrix::from_diagonal(&roots))?.multiply(&vt)?;
    let inv_sqrt = v.multiply(&DenseMatrix::from_diagonal(&inv_roots))?.multiply(&vt)?;
    Ok((sqrt, inv_sqrt))
}
