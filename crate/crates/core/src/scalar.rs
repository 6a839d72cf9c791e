//! Scalar abstraction for cell values and derived statistics.
//!
//! Every kernel in this crate is generic over [`Scalar`] so the same code
//! runs in `f32` or `f64`. The crate-root aliases pin `f64` as the default
//! working precision.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point cell type. `Display`/`FromStr` are required so ASCII grid
/// round-trips go through the shortest exact decimal form of the native type
/// instead of double-rounding via `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + FromStr + Display + Debug + Default + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + FromStr
        + Display
        + Debug
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Cast an `f64` constant into `T`. Panics only if `T` cannot represent any
/// approximation of `v`, which cannot happen for the float types this crate
/// targets.
#[inline]
pub(crate) fn c<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("constant not representable in scalar type")
}
