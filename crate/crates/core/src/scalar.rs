//! Scalar abstraction shared by the numeric modules.
//!
//! Everything that touches real numbers (Gramians, metric vectors, feature
//! matrices) is generic over [`Scalar`]. In practice that means `f32` or
//! `f64`; the pipeline always runs in `f64`.

use nalgebra::RealField;
use num_traits::ToPrimitive;

/// Real floating point type usable by the dense linear algebra in this crate.
pub trait Scalar: RealField + Copy + ToPrimitive {}

impl<T> Scalar for T where T: RealField + Copy + ToPrimitive {}

/// Converts an `f64` constant into `T`.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Converts a `usize` count into `T`.
#[inline]
pub fn from_usize<T: Scalar>(x: usize) -> T {
    nalgebra::convert(x as f64)
}

#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn is_finite<T: Scalar>(x: T) -> bool {
    to_f64(x).is_finite()
}

#[inline]
pub fn abs<T: Scalar>(x: T) -> T {
    nalgebra::ComplexField::abs(x)
}
