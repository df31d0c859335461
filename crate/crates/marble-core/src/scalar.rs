//! Scalar abstraction for the feature-space maths.
//!
//! Everything that operates on feature vectors (quality measures, LVQ,
//! simulated annealing, octil summaries) is generic over [`Real`] so the
//! same code runs in `f32` or `f64`. The crate root exposes `f64` aliases
//! for the common types.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + NumAssign + Sum + Debug + Display + 'static {
    /// Lossy conversion from `f64`; total for any IEEE float type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 converts to any Real")
    }

    /// Conversion from a pixel count or index.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(|| Self::of(n as f64))
    }

    /// Conversion from an 8-bit intensity.
    fn of_u8(v: u8) -> Self {
        Self::from_u8(v).expect("u8 converts to any Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}
