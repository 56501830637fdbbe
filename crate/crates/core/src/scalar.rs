//! Scalar abstraction: all numerics are generic over the underlying real
//! float type, with complex coefficients layered on top via [`num_complex`].

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

/// Real scalar type the whole tower is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lift an `f64` literal into `Self`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over the generic real scalar.
pub type C<T> = Complex<T>;

/// Shorthand for a real-valued complex constant.
pub fn cr<T: Real>(x: f64) -> C<T> {
    C::new(T::of(x), T::zero())
}

/// The imaginary unit.
pub fn im<T: Real>() -> C<T> {
    C::new(T::zero(), T::one())
}
