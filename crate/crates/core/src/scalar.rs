use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

use crate::quadrature::Quantity;

/// Real scalar the whole toolkit is generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + Quantity<Self> + 'static
{
    /// Converts an `f64` literal, panicking only for types that cannot represent it.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("scalar literal out of range")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + Quantity<T> + 'static
{
}

#[inline]
pub(crate) fn lit<T: Scalar>(v: f64) -> T {
    T::lit(v)
}

#[inline]
pub(crate) fn half<T: Scalar>() -> T {
    T::lit(0.5)
}

#[inline]
pub(crate) fn two<T: Scalar>() -> T {
    T::lit(2.0)
}
