//! Scalar abstraction shared by every numerical kernel.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Absolute tolerance used for double-precision invariant checks
/// (normalization, hermiticity, trace, unitarity).
pub const TOLERANCE: f64 = 1e-10;

/// Counterpart of [`TOLERANCE`] for single-precision kernels.
pub const TOLERANCE_F32: f32 = 1e-5;

/// Real scalar type backing complex amplitudes: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Default absolute tolerance for this precision.
    fn tolerance() -> Self;

    /// Lossy conversion from `f64`; all values used here are representable.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 value representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        TOLERANCE
    }
}

impl Scalar for f32 {
    fn tolerance() -> Self {
        TOLERANCE_F32
    }
}
