use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Real scalar the numerical core is generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + FftNum + Sum + Debug + Display + Default
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal fits the scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits the scalar type")
    }

    #[inline]
    fn from_i64_lossy(n: i64) -> Self {
        Self::from_i64(n).expect("i64 fits the scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Full turn, `2π`.
    #[inline]
    fn tau() -> Self {
        Self::TAU()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Euclidean remainder, in `[0, m)` for `m > 0`.
pub fn rem_euclid<T: Real>(x: T, m: T) -> T {
    let r = x % m;
    if r < T::zero() {
        r + m
    } else {
        r
    }
}
