//! Scalar abstraction for the analytic kernels.
//!
//! All closed-form math in this crate is generic over [`Real`], which is
//! implemented for `f32` and `f64`. The concrete `f64` aliases exported at
//! the crate root are what most callers want; `f32` mainly exists for cheap
//! sweeps where the loosened precision is acceptable.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar used by the analytic kernels.
pub trait Real:
    Float + FromPrimitive + core::ops::AddAssign + core::fmt::Debug + core::fmt::Display + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn cast<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("f64 constant not representable in scalar type")
}

/// `x` as f64, for diagnostics and error payloads.
#[inline]
pub(crate) fn to_f64<R: Real>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
