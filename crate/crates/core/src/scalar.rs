//! Scalar abstraction.
//!
//! Every kernel in the crate is generic over a real floating-point type `T`;
//! matrix entries are `Complex<T>`. The handful of tolerances that the solver
//! pins to double-precision values (convergence threshold, rank threshold,
//! pivot threshold) are exposed as associated functions so that `f32` gets
//! values that are attainable in single precision.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumAssign, NumCast};

pub trait Real:
    Float
    + FloatConst
    + NumAssign
    + NumCast
    + Sum
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Base of the automatic convergence threshold `tol = base * sqrt(m)`.
    fn tol_base() -> Self;
    /// Base of the default basis-truncation threshold `base * sqrt(rows)`.
    fn rank_tol_base() -> Self;
    /// Relative pivot magnitude below which a shifted matrix is reported singular.
    fn pivot_tol() -> Self;
    /// Relative backward error accepted for a shifted solve.
    fn solve_tol() -> Self;

    #[inline]
    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("constant representable in scalar type")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        <Self as NumCast>::from(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        <f64 as NumCast>::from(self).unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn tol_base() -> Self {
        1e-14
    }
    fn rank_tol_base() -> Self {
        1e-12
    }
    fn pivot_tol() -> Self {
        1e-14
    }
    fn solve_tol() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn tol_base() -> Self {
        2e-6
    }
    fn rank_tol_base() -> Self {
        5e-5
    }
    fn pivot_tol() -> Self {
        1e-6
    }
    fn solve_tol() -> Self {
        1e-4
    }
}

pub type C<T> = Complex<T>;

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// `|z|^2` without the square root.
#[inline]
pub fn abs2<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

#[inline]
pub fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
