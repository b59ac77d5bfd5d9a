//! Quadrature engines and special functions.

mod quadrature;
mod special;

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub use quadrature::{
    adaptive_integrate, gauss_kronrod, gauss_legendre, integrate_oscillatory, tanh_sinh,
    IntegralResult, QuadratureSpec, SingularPoint,
};
pub use special::{
    bessel_i, bessel_i_scaled, bessel_j, bessel_j_normalized, digamma, gamma, gauss_2f1,
    gauss_2f1_with_complement, ln_gamma, normalized_i_scaled, rgamma,
};

/// Floating point scalar used by the generic numerical core.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap()
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
