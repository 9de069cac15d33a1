use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Numeric thresholds behind every definiteness, symmetry and invertibility decision.
///
/// `pd_eps` and `nn_tol` are relative to `max(1, ‖M‖_max)` of the matrix being
/// judged; `inv_tol` bounds `σ_min/σ_max`; `sym_tol` bounds `‖M − Mᵀ‖/‖M‖`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances<T> {
    pub sym_tol: T,
    pub pd_eps: T,
    pub inv_tol: T,
    pub nn_tol: T,
}

impl<T: Scalar> Tolerances<T> {
    pub fn new(sym_tol: T, pd_eps: T, inv_tol: T, nn_tol: T) -> Result<Self> {
        let tol = Self {
            sym_tol,
            pd_eps,
            inv_tol,
            nn_tol,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sym_tol", self.sym_tol),
            ("pd_eps", self.pd_eps),
            ("inv_tol", self.inv_tol),
            ("nn_tol", self.nn_tol),
        ] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Overrides one threshold by name (`sym_tol`, `pd_eps`, `inv_tol`, `nn_tol`).
    pub fn with(mut self, key: &str, value: T) -> Result<Self> {
        match key {
            "sym_tol" => self.sym_tol = value,
            "pd_eps" => self.pd_eps = value,
            "inv_tol" => self.inv_tol = value,
            "nn_tol" => self.nn_tol = value,
            other => return Err(Error::InvalidArgument(format!("unknown tolerance key {other:?}"))),
        }
        self.validate()?;
        Ok(self)
    }
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        T::default_tolerances()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_positive() {
        let t = Tolerances::<f64>::default();
        assert_eq!(t.sym_tol, 1e-8);
        assert_eq!(t.pd_eps, 1e-9);
        assert_eq!(t.inv_tol, 1e-10);
        assert_eq!(t.nn_tol, 1e-9);
        t.validate().unwrap();
        Tolerances::<f32>::default().validate().unwrap();
    }

    #[test]
    fn rejects_non_positive() {
        assert!(Tolerances::new(1e-8, 0.0, 1e-10, 1e-9).is_err());
        assert!(Tolerances::<f64>::default().with("nn_tol", -1.0).is_err());
        assert!(Tolerances::<f64>::default().with("bogus", 1.0).is_err());
        let t = Tolerances::<f64>::default().with("pd_eps", 1e-6).unwrap();
        assert_eq!(t.pd_eps, 1e-6);
    }
}
