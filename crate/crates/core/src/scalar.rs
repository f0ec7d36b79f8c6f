//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point type the dense algebra is written against: `f32` or `f64`.
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
    + 'static
{
    /// Multiplier applied to the f64-calibrated tolerances.
    const TOL_SCALE: f64;

    /// Converts an f64 literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// An f64 tolerance rescaled to this precision.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x * Self::TOL_SCALE)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const TOL_SCALE: f64 = 1.0;
}

impl Real for f32 {
    const TOL_SCALE: f64 = 1e5;
}

pub type C<R> = Complex<R>;

#[inline]
pub fn c<R: Real>(re: R, im: R) -> C<R> {
    Complex::new(re, im)
}

#[inline]
pub fn czero<R: Real>() -> C<R> {
    Complex::new(R::zero(), R::zero())
}

#[inline]
pub fn cone<R: Real>() -> C<R> {
    Complex::new(R::one(), R::zero())
}

/// The `order`-th roots of unity `exp(2πik/order)`, computed in f64 and cast.
pub fn roots_of_unity<R: Real>(order: u32) -> Vec<C<R>> {
    (0..order)
        .map(|k| {
            // quarter turns are exact
            if (4 * k) % order == 0 {
                let (re, im) = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][(4 * k / order) as usize];
                return Complex::new(R::lit(re), R::lit(im));
            }
            let theta = 2.0 * std::f64::consts::PI * f64::from(k) / f64::from(order);
            Complex::new(R::lit(theta.cos()), R::lit(theta.sin()))
        })
        .collect()
}
