//! Scalar abstraction shared by every geometric routine.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar usable by the kernel: `f32` or `f64`.
///
/// Tolerances quoted throughout the crate (1e-12 and friends) are meaningful
/// for `f64`; `f32` callers should expect roughly single-precision agreement.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + Debug
        + Display
        + LowerExp
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

/// Converts a count into `T`.
#[inline]
pub(crate) fn count<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

/// `base^exp` for a non-negative integer exponent, without the `i32` limit of `powi`.
pub(crate) fn powu<T: Real>(base: T, exp: usize) -> T {
    match i32::try_from(exp) {
        Ok(e) => base.powi(e),
        Err(_) => base.powf(count(exp)),
    }
}

/// `(-1)^n`.
#[inline]
pub(crate) fn alternating<T: Real>(n: usize) -> T {
    if n.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}
