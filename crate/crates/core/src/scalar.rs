//! Scalar abstraction shared by the geometric kernels.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by the geometry kernels: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Rounds `v` to `places` decimal digits.
pub fn round_decimals<S: Scalar>(v: S, places: i32) -> S {
    let k = S::lit(10f64.powi(places));
    let r = (v * k).round() / k;
    // avoid "-0.0" leaking into serialized documents
    if r == S::zero() {
        S::zero()
    } else {
        r
    }
}
