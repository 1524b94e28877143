use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the numerical core is generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts an integer count into the working scalar.
#[inline]
pub fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("integer representable in scalar type")
}

#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
