use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point element type for vectors, objectives and optimizers: `f32` or `f64`.
///
/// Random draws are produced in `f64` and narrowed with [`Scalar::of`].
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into `Self`.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Scalar")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `(cos θ, sin θ)` with the two endpoints of `[0, π/2]` snapped to exact values.
///
/// `cos(π/2)` evaluates to `6.1e-17` in `f64`; the snap makes a θ = π/2 cone
/// direction bitwise equal to a plain sphere direction.
pub fn cone_trig<T: Scalar>(theta: T) -> (T, T) {
    if theta == T::zero() {
        (T::one(), T::zero())
    } else if theta == T::FRAC_PI_2() {
        (T::zero(), T::one())
    } else {
        let (s, c) = theta.sin_cos();
        (c, s)
    }
}
