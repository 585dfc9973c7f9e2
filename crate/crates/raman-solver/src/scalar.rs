//! Scalar abstraction for the solver math.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the whole crate is generic over: `f32` or `f64`.
///
/// `f64` is the recommended choice; the default solver tolerances
/// (boundary errors of 1e-5 W on pumps of a few hundred mW) leave little
/// headroom in single precision.
pub trait RamanScalar:
    Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
}

impl<T> RamanScalar for T where
    T: Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
}

/// Lift an `f64` constant into the working scalar type.
pub(crate) fn cast<T: RamanScalar>(value: f64) -> T {
    T::from_f64(value).expect("constant not representable in scalar type")
}
