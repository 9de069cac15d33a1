//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::linalg::Tolerances;

/// Real floating-point scalar the criteria are generic over (`f32`, `f64`).
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal; every supported type can represent it approximately.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Thresholds appropriate to the precision of the type.
    fn default_tolerances() -> Tolerances<Self>;

    /// Hard cap on cyclic Jacobi sweeps before giving up.
    const MAX_SWEEPS: usize = 100;
}

impl Scalar for f64 {
    fn default_tolerances() -> Tolerances<Self> {
        Tolerances {
            sym_tol: 1e-8,
            pd_eps: 1e-9,
            inv_tol: 1e-10,
            nn_tol: 1e-9,
        }
    }
}

impl Scalar for f32 {
    fn default_tolerances() -> Tolerances<Self> {
        Tolerances {
            sym_tol: 1e-3,
            pd_eps: 1e-4,
            inv_tol: 1e-5,
            nn_tol: 1e-4,
        }
    }
}
