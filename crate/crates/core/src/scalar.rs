//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type the library is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + rustfft::FftNum
    + 'static
{
    /// Converts an `f64` literal. Never fails for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Machine epsilon scaled tolerance used by the merge routines.
    fn merge_tol() -> Self {
        Self::lit(1e-12).max(Self::epsilon() * Self::lit(4.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Squared Euclidean distance between two coordinate slices of equal length.
#[inline]
pub fn dist2<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
}

#[inline]
pub fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    dist2(a, b).sqrt()
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume<T: Real>(d: usize) -> T {
    // V_d = pi^{d/2} / Gamma(d/2 + 1), by the two-step recursion V_d = 2 pi / d * V_{d-2}.
    let two_pi = T::PI() + T::PI();
    let mut v = if d % 2 == 0 { T::one() } else { T::lit(2.0) };
    let mut k = if d % 2 == 0 { 2 } else { 3 };
    while k <= d {
        v = v * two_pi / T::from_usize_lossy(k);
        k += 2;
    }
    v
}

/// Surface area of the unit sphere `S^{d-1}`.
pub fn unit_sphere_area<T: Real>(d: usize) -> T {
    T::from_usize_lossy(d) * unit_ball_volume::<T>(d)
}

/// Volume of the shell `{y : inner <= |y| <= outer}` in `R^d`.
pub fn shell_volume<T: Real>(d: usize, inner: T, outer: T) -> T {
    let inner = inner.max(T::zero());
    unit_ball_volume::<T>(d) * (outer.powi(d as i32) - inner.powi(d as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume::<f64>(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume::<f64>(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume::<f64>(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
        let v4 = std::f64::consts::PI.powi(2) / 2.0;
        assert!((unit_ball_volume::<f64>(4) - v4).abs() < 1e-14);
        assert!((unit_sphere_area::<f64>(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn annulus_area_closed_form() {
        let (r, d) = (0.7_f64, 0.05);
        let a = shell_volume::<f64>(2, r - d, r + d);
        assert!((a - 4.0 * std::f64::consts::PI * r * d).abs() < 1e-14);
    }
}
