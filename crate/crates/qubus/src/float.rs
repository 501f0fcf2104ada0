//! Scalar abstraction for the simulation and budget math.

use num_traits::{Float as NumFloat, FloatConst, NumAssignOps};

/// Floating-point scalar the simulator and error-budget math are generic over.
///
/// Implemented for `f32` and `f64`; the crate root exposes `f64` aliases for
/// the common case.
pub trait Float:
    NumFloat
    + FloatConst
    + NumAssignOps
    + std::fmt::Debug
    + std::fmt::Display
    + std::iter::Sum
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, used for constants and tolerances.
    fn from_f64(x: f64) -> Self;

    /// Widening conversion to `f64`, used for reporting.
    fn to_f64(self) -> f64;
}

impl Float for f32 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Float for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
}

/// Default squared displacement length: β² = π/8, the value at which a closed
/// four-displacement loop imprints the π/4 conditional phase of a CPHASE gate.
///
/// Held symbolically (derived from `T::PI()`) rather than as a decimal literal
/// so every call site agrees bit-for-bit.
#[inline]
pub fn default_beta_sq<T: Float>() -> T {
    T::PI() / T::from_f64(8.0)
}

/// Default displacement length β = sqrt(π/8).
#[inline]
pub fn default_beta<T: Float>() -> T {
    default_beta_sq::<T>().sqrt()
}

/// Wraps an angle into the interval (−π, π].
pub fn wrap_angle<T: Float>(x: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut y = x % two_pi;
    if y > T::PI() {
        y -= two_pi;
    } else if y <= -T::PI() {
        y += two_pi;
    }
    y
}
