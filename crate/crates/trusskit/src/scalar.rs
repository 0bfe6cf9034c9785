//! Scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display};

/// Real field used throughout the crate. Implemented for `f32` and `f64`.
pub trait Real:
    nalgebra::RealField
    + Copy
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + num_traits::FloatConst
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Literal conversion from `f64`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("representable count")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon.
    fn machine_eps() -> Self;
}

impl Real for f32 {
    fn machine_eps() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    fn machine_eps() -> Self {
        f64::EPSILON
    }
}
