//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating point type the model, integrators and analytic bounds are written over.
///
/// Implemented for `f32` and `f64`. Special functions (log-gamma, incomplete
/// gamma) are always evaluated in `f64` and converted back.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Draw one standard normal variate in this precision.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Smallest value a simulated coordinate is allowed to take before it is
    /// clamped and reported as a truncation.
    fn underflow_floor() -> Self;
}

impl Scalar for f64 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn underflow_floor() -> Self {
        1e-300
    }
}

impl Scalar for f32 {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn underflow_floor() -> Self {
        f32::MIN_POSITIVE
    }
}

/// Lossy conversion from an `f64` literal.
#[inline]
pub(crate) fn lit<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("f64 literal representable in scalar type")
}

#[inline]
pub(crate) fn to64<T: Scalar>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}
