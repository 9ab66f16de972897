//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Every algorithm is written against this trait. Tolerances are stated as
/// `f64` literals and converted with [`Real::tol`], which floors them at a
/// small multiple of the type's machine epsilon so that single precision
/// degrades gracefully instead of never converging.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// A tolerance of `x`, never tighter than `64 * epsilon`.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cx<T> = Complex<T>;

#[inline]
pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}

/// Principal square root chosen among `±sqrt(w)` to be closest to `prev`.
#[inline]
pub(crate) fn sqrt_near<T: Real>(w: Cx<T>, prev: Cx<T>) -> Cx<T> {
    let s = w.sqrt();
    if (s - prev).norm_sqr() <= (s + prev).norm_sqr() {
        s
    } else {
        -s
    }
}

/// Angle between two nonzero complex numbers, in `[0, pi]`.
#[inline]
pub(crate) fn phase_gap<T: Real>(a: Cx<T>, b: Cx<T>) -> T {
    (a * b.conj()).arg().abs()
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut t = theta % two_pi;
    if t < T::zero() {
        t = t + two_pi;
    }
    if t >= two_pi {
        t = t - two_pi;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_depends_on_precision() {
        assert_eq!(<f64 as Real>::tol(1e-12), 1e-12);
        assert!(<f32 as Real>::tol(1e-12) > 1e-6);
    }

    #[test]
    fn sqrt_near_follows_previous_value() {
        let w = Complex::new(-1.0_f64, 1e-9);
        let up = sqrt_near(w, Complex::new(0.0, 1.0));
        let down = sqrt_near(w, Complex::new(0.0, -1.0));
        assert!((up - Complex::new(0.0, 1.0)).norm() < 1e-6);
        assert!((down + Complex::new(0.0, 1.0)).norm() < 1e-6);
    }

    #[test]
    fn wrap_angle_range() {
        let two_pi = 2.0 * std::f64::consts::PI;
        for t in [-7.0, -0.1, 0.0, 3.0, 6.5, 13.0] {
            let w = wrap_angle(t);
            assert!((0.0..two_pi).contains(&w));
            assert!(((w - t) / two_pi - ((w - t) / two_pi).round()).abs() < 1e-12);
        }
    }
}
