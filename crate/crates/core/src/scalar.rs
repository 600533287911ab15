//! Scalar abstraction for the numeric core.

use std::fmt::Display;
use std::iter::Sum;

use num_traits::{Float, NumAssign};
use rustfft::FftNum;

/// Floating-point scalar the numeric core is generic over: `f32` or `f64`.
pub trait Real: Float + FftNum + NumAssign + Sum<Self> + Display {}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for pulling an `f64` constant into generic code.
pub(crate) fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant representable in Real scalar")
}
