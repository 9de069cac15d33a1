//! Second-order extremum tests for functionals on `H_1 × … × H_n`.
//!
//! The Hessian `𝓗(Φ)(y) = (∂_ij Φ(y))` is assembled by central differences and
//! fed to the sign criteria: `𝓗 ≫ 0` at a critical point gives a strong local
//! minimum, while a failed nonnegativity test of `𝓗` rules a minimum out.
//! Maxima are handled by negating the Hessian.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::block::{check_point, BlockMatrix, BlockMatrixFile};
use crate::error::{Error, Result};
use crate::explicit::{check_nn_3x3, check_pd_3x3};
use crate::linalg::{DenseMatrix, Tolerances};
use crate::scalar::Scalar;
use crate::schur_first::{check_pd, CheckMode, SignCertificate};
use crate::schur_second::{check_nn, NnCertificate, NnVerdict};

type EvalFn<T> = dyn Fn(&[Vec<T>]) -> T + Send + Sync;

/// A real functional on a product of truncated spaces.
///
/// `eval` receives one coordinate vector per factor. It is called from several
/// threads at once while differentiating, so it must not rely on interior
/// mutability without synchronization.
pub struct ProductFunctional<T> {
    dims: Vec<usize>,
    eval: Box<EvalFn<T>>,
}

impl<T: Scalar> ProductFunctional<T> {
    pub fn new(dims: Vec<usize>, eval: impl Fn(&[Vec<T>]) -> T + Send + Sync + 'static) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "dims must be nonempty and positive, got {dims:?}"
            )));
        }
        Ok(Self {
            dims,
            eval: Box::new(eval),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn eval(&self, point: &[Vec<T>]) -> Result<T> {
        check_point(&self.dims, point)?;
        self.eval_unchecked(point)
    }

    fn eval_unchecked(&self, point: &[Vec<T>]) -> Result<T> {
        let v = (self.eval)(point);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteEvaluation)
        }
    }

    fn eval_flat(&self, flat: &[T]) -> Result<T> {
        self.eval_unchecked(&split(flat, &self.dims))
    }
}

impl<T> fmt::Debug for ProductFunctional<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProductFunctional")
            .field("dims", &self.dims)
            .finish_non_exhaustive()
    }
}

fn split<T: Copy>(flat: &[T], dims: &[usize]) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(dims.len());
    let mut at = 0;
    for &d in dims {
        out.push(flat[at..at + d].to_vec());
        at += d;
    }
    out
}

fn check_step<T: Scalar>(step: T) -> Result<()> {
    if step > T::zero() && step.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("step must be positive, got {step}")))
    }
}

fn point_norm<T: Scalar>(y: &[Vec<T>]) -> T {
    y.iter().flatten().map(|&v| v * v).sum::<T>().sqrt()
}

/// `1e-3 · max(1, ‖y‖)`.
pub fn default_step<T: Scalar>(y: &[Vec<T>]) -> T {
    T::lit(1e-3) * point_norm(y).max(T::one())
}

/// Central-difference gradient, one vector per coordinate block.
pub fn gradient_fd<T: Scalar>(phi: &ProductFunctional<T>, y: &[Vec<T>], step: T) -> Result<Vec<Vec<T>>> {
    check_step(step)?;
    check_point(&phi.dims, y)?;
    let base: Vec<T> = y.iter().flatten().copied().collect();
    let two = T::lit(2.0);
    let grad = (0..base.len())
        .into_par_iter()
        .map(|k| {
            let mut p = base.clone();
            p[k] = base[k] + step;
            let fp = phi.eval_flat(&p)?;
            p[k] = base[k] - step;
            let fm = phi.eval_flat(&p)?;
            Ok((fp - fm) / (two * step))
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(split(&grad, &phi.dims))
}

/// Second central differences without symmetrization.
pub fn hessian_fd_raw<T: Scalar>(phi: &ProductFunctional<T>, y: &[Vec<T>], step: T) -> Result<DenseMatrix<T>> {
    check_step(step)?;
    check_point(&phi.dims, y)?;
    let base: Vec<T> = y.iter().flatten().copied().collect();
    let n = base.len();
    let f0 = phi.eval_flat(&base)?;
    let (s2, four_s2) = (step * step, T::lit(4.0) * step * step);
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut p = base.clone();
            let mut row = vec![T::zero(); n];
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = if i == j {
                    p[i] = base[i] + step;
                    let fp = phi.eval_flat(&p)?;
                    p[i] = base[i] - step;
                    let fm = phi.eval_flat(&p)?;
                    p[i] = base[i];
                    (fp - T::lit(2.0) * f0 + fm) / s2
                } else {
                    let mut corner = |si: T, sj: T| {
                        p[i] = base[i] + si * step;
                        p[j] = base[j] + sj * step;
                        let v = phi.eval_flat(&p);
                        p[i] = base[i];
                        p[j] = base[j];
                        v
                    };
                    let one = T::one();
                    let pp = corner(one, one)?;
                    let pm = corner(one, -one)?;
                    let mp = corner(-one, one)?;
                    let mm = corner(-one, -one)?;
                    (pp - pm - mp + mm) / four_s2
                };
            }
            Ok(row)
        })
        .collect::<Result<Vec<Vec<T>>>>()?;
    DenseMatrix::from_row_major(n, n, rows.into_iter().flatten().collect())
}

/// Finite-difference Hessian symmetrized as `(H + Hᵀ)/2` and laid out per `dims`.
pub fn hessian_fd<T: Scalar>(phi: &ProductFunctional<T>, y: &[Vec<T>], step: T) -> Result<BlockMatrix<T>> {
    BlockMatrix::assemble(&hessian_fd_raw(phi, y, step)?.symmetrized(), &phi.dims)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    StrongLocalMin,
    StrongLocalMax,
    NotAMin,
    NotAMax,
    Inconclusive,
}

/// Why a report reached its classification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// Some gradient block exceeded `grad_tol`.
    NotCritical,
    /// A sign certificate settled the point.
    Certified,
    /// The nonnegativity criterion failed for `𝓗`, `−𝓗` or both.
    NecessaryConditionViolated,
    /// Neither definite, and a nonnegativity gate failed, so no necessary test applies.
    GatesFailed,
    /// Neither definite and both nonnegativity tests passed (a degenerate point).
    SemidefiniteOnly,
    NumericFailure(String),
}

fn ser_hessian<S: Serializer, T: Scalar>(h: &BlockMatrix<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
    BlockMatrixFile::from(h).serialize(s)
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Scalar"))]
pub struct ExtremumReport<T> {
    pub classification: Classification,
    pub reason: Reason,
    /// `‖∂_i Φ(y)‖` per block; absent when a Hessian was supplied directly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gradient_norms: Option<Vec<T>>,
    /// True when the nonnegativity test of `𝓗` failed.
    pub rules_out_min: bool,
    /// True when the nonnegativity test of `−𝓗` failed.
    pub rules_out_max: bool,
    #[serde(serialize_with = "ser_hessian")]
    pub hessian: BlockMatrix<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pd_certificate: Option<SignCertificate<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pd_certificate_negated: Option<SignCertificate<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nn_certificate: Option<NnCertificate<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nn_certificate_negated: Option<NnCertificate<T>>,
}

impl<T: Scalar> ExtremumReport<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    fn bare(hessian: BlockMatrix<T>, gradient_norms: Option<Vec<T>>) -> Self {
        Self {
            classification: Classification::Inconclusive,
            reason: Reason::NotCritical,
            gradient_norms,
            rules_out_min: false,
            rules_out_max: false,
            hessian,
            pd_certificate: None,
            pd_certificate_negated: None,
            nn_certificate: None,
            nn_certificate_negated: None,
        }
    }
}

impl<T: Scalar> fmt::Display for ExtremumReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "classification: {:?}", self.classification)?;
        writeln!(f, "reason: {:?}", self.reason)?;
        if let Some(g) = &self.gradient_norms {
            let parts: Vec<String> = g.iter().map(|v| format!("{v:.3e}")).collect();
            writeln!(f, "gradient norms: [{}]", parts.join(", "))?;
        }
        if self.rules_out_min || self.rules_out_max {
            writeln!(f, "rules out: min={} max={}", self.rules_out_min, self.rules_out_max)?;
        }
        let sections: [(&str, Option<&dyn fmt::Display>); 4] = [
            (
                "positive definiteness of H",
                self.pd_certificate.as_ref().map(|c| c as _),
            ),
            (
                "positive definiteness of -H",
                self.pd_certificate_negated.as_ref().map(|c| c as _),
            ),
            ("nonnegativity of H", self.nn_certificate.as_ref().map(|c| c as _)),
            (
                "nonnegativity of -H",
                self.nn_certificate_negated.as_ref().map(|c| c as _),
            ),
        ];
        for (title, cert) in sections {
            if let Some(c) = cert {
                writeln!(f, "\n{title}:")?;
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

/// Classifies `y` from the finite-difference gradient and Hessian.
///
/// `step` defaults to `1e-3 · max(1, ‖y‖)`; the gradient must vanish to within
/// `grad_tol` (`1e-6` when `None`). Never fails: numeric problems end up as
/// [`Reason::NumericFailure`] in an `Inconclusive` report, except for a point
/// whose shape does not match the functional.
pub fn classify_critical_point<T: Scalar>(
    phi: &ProductFunctional<T>,
    y: &[Vec<T>],
    tol: &Tolerances<T>,
    step: Option<T>,
    grad_tol: Option<T>,
) -> Result<ExtremumReport<T>> {
    check_point(&phi.dims, y)?;
    let step = step.unwrap_or_else(|| default_step(y));
    let grad_tol = grad_tol.unwrap_or_else(|| T::lit(1e-6));
    let fd = gradient_fd(phi, y, step).and_then(|g| Ok((g, hessian_fd(phi, y, step)?)));
    let (grad, hessian) = match fd {
        Ok(pair) => pair,
        Err(e) => {
            let mut r = ExtremumReport::bare(BlockMatrix::identity(&phi.dims), None);
            r.reason = Reason::NumericFailure(e.to_string());
            return Ok(r);
        }
    };
    let norms: Vec<T> = grad.iter().map(|g| point_norm(std::slice::from_ref(g))).collect();
    if norms.iter().any(|&g| g > grad_tol) {
        return Ok(ExtremumReport::bare(hessian, Some(norms)));
    }
    Ok(classify_at_critical(hessian, Some(norms), tol))
}

/// Classification from a supplied Hessian; the point is assumed critical.
pub fn classify_hessian<T: Scalar>(hessian: &BlockMatrix<T>, tol: &Tolerances<T>) -> ExtremumReport<T> {
    classify_at_critical(hessian.clone(), None, tol)
}

fn classify_at_critical<T: Scalar>(
    hessian: BlockMatrix<T>,
    gradient_norms: Option<Vec<T>>,
    tol: &Tolerances<T>,
) -> ExtremumReport<T> {
    let mut r = ExtremumReport::bare(hessian, gradient_norms);
    if let Err(e) = decide(&mut r, tol) {
        r.classification = Classification::Inconclusive;
        r.reason = Reason::NumericFailure(e.to_string());
    }
    r
}

fn decide<T: Scalar>(r: &mut ExtremumReport<T>, tol: &Tolerances<T>) -> Result<()> {
    let h = r.hessian.clone();
    let neg = h.neg();

    let pd = check_pd(&h, tol, CheckMode::EarlyExit)?;
    let is_min = pd.is_positive_definite();
    r.pd_certificate = Some(pd);
    if is_min {
        r.classification = Classification::StrongLocalMin;
        r.reason = Reason::Certified;
        return Ok(());
    }
    let pd_neg = check_pd(&neg, tol, CheckMode::EarlyExit)?;
    let is_max = pd_neg.is_positive_definite();
    r.pd_certificate_negated = Some(pd_neg);
    if is_max {
        r.classification = Classification::StrongLocalMax;
        r.reason = Reason::Certified;
        return Ok(());
    }

    let nn = check_nn(&h, tol)?;
    let nn_neg = check_nn(&neg, tol)?;
    r.rules_out_min = nn.verdict == NnVerdict::NotNonnegative;
    r.rules_out_max = nn_neg.verdict == NnVerdict::NotNonnegative;
    let gates_failed = [&nn, &nn_neg]
        .iter()
        .any(|c| c.verdict == NnVerdict::PreconditionFailed);
    r.nn_certificate = Some(nn);
    r.nn_certificate_negated = Some(nn_neg);
    (r.classification, r.reason) = match (r.rules_out_min, r.rules_out_max) {
        (true, _) => (Classification::NotAMin, Reason::NecessaryConditionViolated),
        (false, true) => (Classification::NotAMax, Reason::NecessaryConditionViolated),
        _ if gates_failed => (Classification::Inconclusive, Reason::GatesFailed),
        _ => (Classification::Inconclusive, Reason::SemidefiniteOnly),
    };
    Ok(())
}

fn require_order<T: Scalar>(h: &BlockMatrix<T>, n: usize) -> Result<()> {
    if h.order() == n {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!(
            "expected a {n}-block Hessian, got {} blocks",
            h.order()
        )))
    }
}

/// Two-variable sufficient condition: `∂₁₁Φ ≫ 0`, `∂₂₂Φ ≫ 0` and both
/// complements `≫ 0`. Identical to the full first-kind tree on two blocks.
pub fn check_sufficient_2var<T: Scalar>(h: &BlockMatrix<T>, tol: &Tolerances<T>) -> Result<SignCertificate<T>> {
    require_order(h, 2)?;
    check_pd(h, tol, CheckMode::FullTree)
}

/// Three-variable sufficient condition via the ten explicit inequalities.
pub fn check_sufficient_3var<T: Scalar>(h: &BlockMatrix<T>, tol: &Tolerances<T>) -> Result<SignCertificate<T>> {
    require_order(h, 3)?;
    check_pd_3x3(h, tol)
}

/// Three-variable necessary condition for a minimum.
pub fn check_necessary_3var<T: Scalar>(h: &BlockMatrix<T>, tol: &Tolerances<T>) -> Result<NnCertificate<T>> {
    require_order(h, 3)?;
    check_nn_3x3(h, tol)
}

/// `Φ(x,y,z) = ‖x‖² + ‖y‖² + ‖z‖² + x₁² + z₁² + x₁x₂ + y₁y₂ + z₁z₂ + x₁z₁`
/// on three copies of ℓ² truncated to `n` coordinates.
///
/// The coupling terms touch only the first two coordinates, so the truncation
/// is exact. Zero is a critical point with a strong local minimum.
pub fn example_l2_functional<T: Scalar>(n: usize) -> Result<ProductFunctional<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "truncation must be at least 2, got {n}"
        )));
    }
    ProductFunctional::new(vec![n; 3], |p: &[Vec<T>]| {
        let (x, y, z) = (&p[0], &p[1], &p[2]);
        let sq = |v: &Vec<T>| v.iter().map(|&a| a * a).sum::<T>();
        sq(x) + sq(y) + sq(z) + x[0] * x[0] + z[0] * z[0] + x[0] * x[1] + y[0] * y[1] + z[0] * z[1] + x[0] * z[0]
    })
}

/// The analytic Hessian of [`example_l2_functional`]: `∂²Φ/∂x² = ∂²Φ/∂z² =
/// [[4,1],[1,2]] ⊕ 2I`, `∂²Φ/∂y² = [[2,1],[1,2]] ⊕ 2I`, `∂²Φ/∂x∂z = e₁e₁ᵀ`.
pub fn example_l2_hessian<T: Scalar>(n: usize) -> Result<BlockMatrix<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "truncation must be at least 2, got {n}"
        )));
    }
    let diag = |lead: f64| {
        let mut m = DenseMatrix::<T>::identity(n).scale(T::lit(2.0));
        m[(0, 0)] = T::lit(lead);
        m[(0, 1)] = T::one();
        m[(1, 0)] = T::one();
        m
    };
    let mut xz = DenseMatrix::zeros(n, n);
    xz[(0, 0)] = T::one();
    let zero = DenseMatrix::zeros(n, n);
    BlockMatrix::new(
        vec![n; 3],
        vec![
            vec![diag(4.0), zero.clone(), xz.clone()],
            vec![zero.clone(), diag(2.0), zero.clone()],
            vec![xz, zero, diag(4.0)],
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explicit::check_pd_bidiagonal;
    use crate::schur_first::PdVerdict;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn norm_sq(dims: Vec<usize>, sign: f64) -> ProductFunctional<f64> {
        ProductFunctional::new(dims, move |p: &[Vec<f64>]| {
            sign * p.iter().flatten().map(|v| v * v).sum::<f64>()
        })
        .unwrap()
    }

    fn zeros(dims: &[usize]) -> Vec<Vec<f64>> {
        dims.iter().map(|&d| vec![0.0; d]).collect()
    }

    #[test]
    fn gradient_of_norm_and_affine() {
        let phi = norm_sq(vec![2, 1], 1.0);
        let g = gradient_fd(&phi, &zeros(&[2, 1]), 1e-3).unwrap();
        assert!(g.iter().flatten().all(|&v| v == 0.0));
        let a = [1.5, -2.0, 0.25];
        let lin = ProductFunctional::new(vec![1, 2], move |p: &[Vec<f64>]| {
            a[0] * p[0][0] + a[1] * p[1][0] + a[2] * p[1][1]
        })
        .unwrap();
        let g = gradient_fd(&lin, &[vec![0.3], vec![-0.1, 2.0]], 1e-3).unwrap();
        for (got, want) in g.iter().flatten().zip(a) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn l2_example_values_and_gradient() {
        let phi = example_l2_functional::<f64>(4).unwrap();
        assert_eq!(phi.eval(&zeros(&[4, 4, 4])).unwrap(), 0.0);
        let e1 = vec![1.0, 0.0, 0.0, 0.0];
        assert_eq!(phi.eval(&[e1.clone(), vec![0.0; 4], vec![0.0; 4]]).unwrap(), 2.0);
        let g = gradient_fd(&phi, &[e1.clone(), vec![0.0; 4], e1], 1e-3).unwrap();
        for (got, want) in g[0].iter().zip([5.0, 1.0, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-9);
        }
        assert!(matches!(
            example_l2_functional::<f64>(1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn hessian_matches_analytic() {
        for n in [2, 4, 8] {
            let phi = example_l2_functional::<f64>(n).unwrap();
            let h = hessian_fd(&phi, &zeros(&[n; 3]), 1e-3).unwrap().flatten();
            let want = example_l2_hessian::<f64>(n).unwrap().flatten();
            assert!(h.subtract(&want).unwrap().max_norm() < 1e-4);
        }
        let cube = ProductFunctional::new(vec![1], |p: &[Vec<f64>]| p[0][0].powi(3)).unwrap();
        assert!(hessian_fd(&cube, &[vec![0.0]], 1e-3).unwrap().block(0, 0)[(0, 0)].abs() < 1e-9);
    }

    #[test]
    fn l2_example_is_strong_min_on_every_path() {
        let phi = example_l2_functional::<f64>(4).unwrap();
        let r = classify_critical_point(&phi, &zeros(&[4; 3]), &tol(), None, None).unwrap();
        assert_eq!(r.classification, Classification::StrongLocalMin);
        let h = &r.hessian;
        assert!(check_sufficient_3var(h, &tol()).unwrap().is_positive_definite());
        let bi = check_pd_bidiagonal(h, &tol()).unwrap();
        assert_eq!((bi.verdict, bi.leaf_count), (PdVerdict::PositiveDefinite, 5));
    }

    #[test]
    fn max_and_saddle() {
        let r = classify_critical_point(&norm_sq(vec![1, 2], -1.0), &zeros(&[1, 2]), &tol(), None, None).unwrap();
        assert_eq!(r.classification, Classification::StrongLocalMax);

        let saddle = ProductFunctional::new(vec![1, 1], |p: &[Vec<f64>]| p[0][0].powi(2) - p[1][0].powi(2)).unwrap();
        let r = classify_critical_point(&saddle, &zeros(&[1, 1]), &tol(), None, None).unwrap();
        assert_eq!(r.classification, Classification::NotAMin);
        assert!(r.rules_out_min && r.rules_out_max);
    }

    #[test]
    fn not_critical_is_inconclusive() {
        let lin = ProductFunctional::new(vec![1], |p: &[Vec<f64>]| p[0][0]).unwrap();
        let r = classify_critical_point(&lin, &[vec![0.0]], &tol(), None, None).unwrap();
        assert_eq!(
            (r.classification, r.reason),
            (Classification::Inconclusive, Reason::NotCritical)
        );
    }

    #[test]
    fn raw_hessians() {
        let id = BlockMatrix::<f64>::identity(&[2, 2]);
        assert_eq!(
            classify_hessian(&id, &tol()).classification,
            Classification::StrongLocalMin
        );
        let d = BlockMatrix::from_scalar_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        assert_eq!(classify_hessian(&d, &tol()).classification, Classification::NotAMin);
        // degenerate: zero Hessian has singular gates both ways
        let z = BlockMatrix::from_scalar_rows(&[&[0.0, 0.0], &[0.0, 0.0]]).unwrap();
        let r = classify_hessian(&z, &tol());
        assert_eq!(
            (r.classification, r.reason),
            (Classification::Inconclusive, Reason::GatesFailed)
        );
    }

    #[test]
    fn two_and_three_variable_conditions() {
        let ok = BlockMatrix::from_scalar_rows(&[&[4.0, 1.0], &[1.0, 2.0]]).unwrap();
        let cert = check_sufficient_2var(&ok, &tol()).unwrap();
        assert!(cert.is_positive_definite());
        let mut l: Vec<f64> = cert.leaves().iter().map(|n| n.lambda_min.unwrap()).collect();
        l.sort_by(f64::total_cmp);
        for (g, w) in l.iter().zip([7.0 / 4.0, 2.0, 7.0 / 2.0, 4.0]) {
            assert!((g - w).abs() < 1e-14);
        }
        let bad = BlockMatrix::from_scalar_rows(&[&[1.0, 2.0], &[2.0, 1.0]]).unwrap();
        assert!(!check_sufficient_2var(&bad, &tol()).unwrap().is_positive_definite());

        let mut h = example_l2_hessian::<f64>(2).unwrap().flatten();
        for k in 4..6 {
            for c in 0..6 {
                h[(k, c)] = 0.0;
                h[(c, k)] = 0.0;
            }
            h[(k, k)] = -1.0;
        }
        let h = BlockMatrix::assemble(&h, &[2, 2, 2]).unwrap();
        let cert = check_sufficient_3var(&h, &tol()).unwrap();
        assert_eq!(cert.failure.as_deref(), Some("D22.D22"));

        let d = |v: [f64; 3]| {
            BlockMatrix::block_diagonal(v.iter().map(|&x| DenseMatrix::from_diagonal(&[x])).collect()).unwrap()
        };
        let c = check_necessary_3var(&d([1.0, 1.0, -1.0]), &tol()).unwrap();
        assert_eq!((c.verdict, c.failure), (NnVerdict::NotNonnegative, Some(2)));
        let general = check_nn(&d([1.0, 1.0, -1.0]), &tol()).unwrap();
        assert_eq!((general.verdict, general.failure), (c.verdict, c.failure));
        for (a, b) in general.stages.iter().zip(&c.stages) {
            assert_eq!((a.lambda_min, a.verdict), (b.lambda_min, b.verdict));
        }
        assert_eq!(
            check_necessary_3var(&d([1.0, 0.0, 1.0]), &tol()).unwrap().verdict,
            NnVerdict::PreconditionFailed
        );
    }

    #[test]
    fn report_json_has_fields() {
        let r = classify_hessian(&BlockMatrix::<f64>::identity(&[1, 1]), &tol());
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["classification"], "StrongLocalMin");
        assert!(v["hessian"]["blocks"].is_array());
        assert!(v["pd_certificate"]["root"].is_object());
    }
}
