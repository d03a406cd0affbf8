//! Floating-point abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type the geometry is computed in: `f32` or `f64`.
///
/// Tolerances that are quoted for double precision are rescaled for
/// single precision through [`Scalar::geometric_tolerance`] and
/// [`Scalar::pivot_tolerance`].
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Relative tolerance for "tight" facet inequalities and vertex dedup.
    fn geometric_tolerance() -> Self;

    /// Relative pivot floor for symmetric factorizations (scaled by trace).
    fn pivot_tolerance() -> Self;

    /// Lossy conversion from `f64`; every literal in the crate goes through here.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(k: usize) -> Self {
        Self::from_usize(k).expect("usize representable")
    }

    #[inline]
    fn from_int(k: i64) -> Self {
        Self::from_i64(k).expect("i64 representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn geometric_tolerance() -> Self {
        1e-9
    }
    fn pivot_tolerance() -> Self {
        1e-14
    }
}

impl Scalar for f32 {
    fn geometric_tolerance() -> Self {
        1e-4
    }
    fn pivot_tolerance() -> Self {
        1e-6
    }
}

/// Neumaier-compensated running sum. Summation order is the call order.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}
