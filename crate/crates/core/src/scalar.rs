//! Scalar abstraction shared by the geometry modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar: `f32` or `f64`.
///
/// Tolerances throughout the crate are written as `f64` literals and passed
/// through [`Real::tol`], which floors them at a small multiple of machine
/// epsilon so that single precision stays usable.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    /// A tolerance of `x`, but never tighter than `64 * epsilon`.
    #[inline]
    fn tol(x: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(x).max(floor)
    }

    /// `sqrt(3)`
    #[inline]
    fn sqrt3() -> Self {
        Self::lit(3.0).sqrt()
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
