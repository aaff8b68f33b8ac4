//! Floating-point scalar abstraction shared by every bit-length computation.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar usable for bit arithmetic: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + std::iter::Sum
    + std::ops::AddAssign
    + std::ops::SubAssign
    + std::ops::MulAssign
    + 'static
{
    /// Converts an `f64` literal; panics only if the target cannot hold it.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Absolute tolerance used for mass sums, Kraft sums and identity checks.
    ///
    /// `1e-9` for `f64`; widened to a few hundred ulps for narrower types.
    #[inline]
    fn tolerance() -> Self {
        let floor = Self::of(1e-9);
        let ulps = Self::epsilon() * Self::of(256.0);
        if ulps > floor {
            ulps
        } else {
            floor
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<S: Scalar>(values: impl IntoIterator<Item = S>) -> S {
    let mut sum = S::zero();
    let mut comp = S::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    // an infinite term poisons the compensation with NaN
    if sum.is_finite() {
        sum + comp
    } else {
        sum
    }
}
