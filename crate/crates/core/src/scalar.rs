//! Scalar plumbing: every numeric module is generic over a real type `T`
//! and works with complex values `Cx<T>`.

use std::fmt;

use nalgebra as na;
use num_complex::Complex;
use num_traits as nt;

/// Real scalar usable by the lab (implemented for `f32` and `f64`).
pub trait Real:
    Copy
    + nt::FromPrimitive
    + nt::ToPrimitive
    + na::RealField
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Machine epsilon of the type.
    const EPS: Self;

    /// Converts an `f64` literal.
    fn lit(v: f64) -> Self;

    /// Lossy conversion used for reporting.
    fn as_f64(self) -> f64;
}

macro_rules! impl_real {
    ($f:ty) => {
        impl Real for $f {
            const EPS: Self = <$f>::EPSILON;

            #[inline]
            fn lit(v: f64) -> Self {
                v as $f
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Complex scalar over `T`.
pub type Cx<T> = Complex<T>;

/// Builds a complex number from `f64` parts.
#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(T::lit(re), T::lit(im))
}

/// Embeds a real `f64` constant.
#[inline]
pub fn cr<T: Real>(re: f64) -> Cx<T> {
    Complex::new(T::lit(re), T::zero())
}

#[inline]
pub fn czero<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Cx<T> {
    Complex::new(T::one(), T::zero())
}

/// Modulus |z|.
#[inline]
pub fn cabs<T: Real>(z: Cx<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub fn is_finite<T: Real>(z: Cx<T>) -> bool {
    let re = z.re.as_f64();
    let im = z.im.as_f64();
    re.is_finite() && im.is_finite()
}

#[inline]
pub fn csinh<T: Real>(z: Cx<T>) -> Cx<T> {
    <Cx<T> as na::ComplexField>::sinh(z)
}

#[inline]
pub fn cexp<T: Real>(z: Cx<T>) -> Cx<T> {
    <Cx<T> as na::ComplexField>::exp(z)
}

/// Principal branch logarithm.
#[inline]
pub fn cln<T: Real>(z: Cx<T>) -> Cx<T> {
    <Cx<T> as na::ComplexField>::ln(z)
}

/// Principal branch square root.
#[inline]
pub fn csqrt<T: Real>(z: Cx<T>) -> Cx<T> {
    <Cx<T> as na::ComplexField>::sqrt(z)
}

/// Integer power by repeated multiplication (exact for small exponents).
pub fn cpowi<T: Real>(z: Cx<T>, k: usize) -> Cx<T> {
    let mut acc = cone::<T>();
    for _ in 0..k {
        acc *= z;
    }
    acc
}

/// Complex-valued integer-signed power; negative exponents invert.
pub fn cpow_signed<T: Real>(z: Cx<T>, k: i64) -> Cx<T> {
    if k >= 0 {
        cpowi(z, k as usize)
    } else {
        cone::<T>() / cpowi(z, k.unsigned_abs() as usize)
    }
}

/// `k!` as a real scalar.
pub fn factorial<T: Real>(k: usize) -> T {
    (1..=k).fold(T::one(), |acc, j| acc * T::lit(j as f64))
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, j| acc * (n - j) / (j + 1))
}
