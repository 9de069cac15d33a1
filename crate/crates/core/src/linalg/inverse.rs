use crate::error::{Error, Result};
use crate::linalg::eigen::singular_values;
use crate::linalg::{DenseMatrix, Tolerances};
use crate::scalar::Scalar;

/// Result of the invertibility gate: `σ_min / σ_max` and whether it clears `inv_tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertibilityGate<T> {
    pub ratio: T,
    pub passed: bool,
}

/// Evaluates the singular-value ratio gate without inverting.
pub fn invertibility_gate<T: Scalar>(m: &DenseMatrix<T>, tol: &Tolerances<T>) -> Result<InvertibilityGate<T>> {
    m.require_square()?;
    if m.rows() == 0 {
        return Ok(InvertibilityGate {
            ratio: T::one(),
            passed: true,
        });
    }
    let sv = singular_values(m)?;
    let max = sv[0];
    let min = *sv.last().unwrap();
    let ratio = if max == T::zero() { T::zero() } else { min / max };
    Ok(InvertibilityGate {
        ratio,
        passed: ratio >= tol.inv_tol,
    })
}

/// Inverts a square matrix after it passes the singular-value gate.
///
/// Gauss-Jordan elimination with partial pivoting; ties in pivot magnitude
/// go to the lowest row index.
pub fn invert<T: Scalar>(m: &DenseMatrix<T>, tol: &Tolerances<T>) -> Result<DenseMatrix<T>> {
    let gate = invertibility_gate(m, tol)?;
    if !gate.passed {
        return Err(Error::NumericallySingular {
            unit: "matrix".into(),
            ratio: gate.ratio.as_f64(),
        });
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut inv = DenseMatrix::identity(n);

    for col in 0..n {
        let mut pivot = col;
        for r in (col + 1)..n {
            if a[(r, col)].abs() > a[(pivot, col)].abs() {
                pivot = r;
            }
        }
        if a[(pivot, col)] == T::zero() {
            return Err(Error::NumericallySingular {
                unit: "matrix".into(),
                ratio: 0.0,
            });
        }
        if pivot != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = t;
                let t = inv[(col, j)];
                inv[(col, j)] = inv[(pivot, j)];
                inv[(pivot, j)] = t;
            }
        }
        let d = a[(col, col)];
        for j in 0..n {
            a[(col, j)] = a[(col, j)] / d;
            inv[(col, j)] = inv[(col, j)] / d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[(r, col)];
            if f == T::zero() {
                continue;
            }
            for j in 0..n {
                a[(r, j)] = a[(r, j)] - f * a[(col, j)];
                inv[(r, j)] = inv[(r, j)] - f * inv[(col, j)];
            }
        }
    }
    Ok(inv)
}
