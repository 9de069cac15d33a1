//! Cyclic Jacobi diagonalization for symmetric matrices and one-sided Jacobi
//! for singular values. Both sweep pairs `(p, q)` in row order with no
//! randomization, so results are reproducible bit for bit.

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Tolerances};
use crate::scalar::Scalar;

/// Eigen-decomposition `M = V diag(values) Vᵀ` with values ascending.
#[derive(Debug, Clone)]
pub(crate) struct SymEigen<T> {
    pub values: Vec<T>,
    /// Eigenvectors stored as columns; empty when not requested.
    pub vectors: Option<DenseMatrix<T>>,
}

/// Rejects non-square input and asymmetry beyond `sym_tol`, returning the symmetrized matrix.
pub(crate) fn checked_symmetric<T: Scalar>(m: &DenseMatrix<T>, tol: &Tolerances<T>) -> Result<DenseMatrix<T>> {
    m.require_square()?;
    let asym = m.relative_asymmetry()?;
    if asym > tol.sym_tol {
        return Err(Error::AsymmetricInput {
            asymmetry: asym.as_f64(),
            sym_tol: tol.sym_tol.as_f64(),
        });
    }
    Ok(m.symmetrized())
}

pub(crate) fn jacobi_eigen<T: Scalar>(sym: &DenseMatrix<T>, want_vectors: bool) -> Result<SymEigen<T>> {
    let n = sym.rows();
    let mut a = sym.clone();
    let mut v = want_vectors.then(|| DenseMatrix::identity(n));
    let threshold = T::epsilon() * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..T::MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, v.as_mut(), p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::NoConvergence { sweeps: T::MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = v.map(|v| {
        let mut sorted = DenseMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            for k in 0..n {
                sorted[(k, dst)] = v[(k, src)];
            }
        }
        sorted
    });
    Ok(SymEigen { values, vectors })
}

fn off_diagonal_norm<T: Scalar>(a: &DenseMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p][q]` with a single plane rotation.
fn rotate<T: Scalar>(a: &mut DenseMatrix<T>, v: Option<&mut DenseMatrix<T>>, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == T::zero() {
        return;
    }
    let n = a.rows();
    let two = T::lit(2.0);
    let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
    let t = if theta.abs() > T::lit(1e150).min(T::max_value().sqrt()) {
        T::one() / (two * theta)
    } else {
        let mag = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
        if theta < T::zero() {
            -mag
        } else {
            mag
        }
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[(k, p)] = new_kp;
        a[(p, k)] = new_kp;
        a[(k, q)] = new_kq;
        a[(q, k)] = new_kq;
    }
    a[(p, p)] = a[(p, p)] - t * apq;
    a[(q, q)] = a[(q, q)] + t * apq;
    a[(p, q)] = T::zero();
    a[(q, p)] = T::zero();

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = c * vkp - s * vkq;
            v[(k, q)] = s * vkp + c * vkq;
        }
    }
}

/// Singular values (descending) by one-sided Jacobi orthogonalization of the columns.
pub(crate) fn singular_values<T: Scalar>(m: &DenseMatrix<T>) -> Result<Vec<T>> {
    let (rows, cols) = m.shape();
    let mut u = m.clone();
    let eps = T::epsilon();
    let two = T::lit(2.0);

    let mut converged = cols < 2;
    for _ in 0..T::MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for k in 0..rows {
                    let up = u[(k, p)];
                    let uq = u[(k, q)];
                    alpha = alpha + up * up;
                    beta = beta + uq * uq;
                    gamma = gamma + up * uq;
                }
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (two * gamma);
                let mag = T::one() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let t = if zeta < T::zero() { -mag } else { mag };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for k in 0..rows {
                    let up = u[(k, p)];
                    let uq = u[(k, q)];
                    u[(k, p)] = c * up - s * uq;
                    u[(k, q)] = s * up + c * uq;
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: T::MAX_SWEEPS });
    }
    let mut sv: Vec<T> = (0..cols)
        .map(|j| (0..rows).map(|k| u[(k, j)] * u[(k, j)]).sum::<T>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(sv)
}
