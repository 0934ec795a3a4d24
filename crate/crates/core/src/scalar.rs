//! Scalar abstraction for the model and sampling layers.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst};
use rustfft::FftNum;

/// Floating-point type the continuous models and the expected periodogram
/// are generic over. Implemented for `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FftNum + Default + Display + Debug + Send + Sync + 'static
{
    fn of(x: f64) -> Self;

    fn to_f64_lossy(self) -> f64;
}

impl Real for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}
