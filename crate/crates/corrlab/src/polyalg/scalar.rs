//! Coefficient domains: `C64` for numeric work, `CQ` (Gaussian rationals)
//! for exact algebra. Every f64 is an exact rational, so conversion into the
//! exact domain is lossless.

use num::rational::BigRational;
use num_complex::Complex;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type C64 = Complex<f64>;
pub type Q = BigRational;
pub type CQ = Complex<BigRational>;

/// Field of polynomial coefficients. Blanket-implemented; the two instances
/// used throughout are `C64` and `CQ`.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Approximate magnitude, for scale estimates and trimming heuristics.
    fn approx_mag(&self) -> f64;
}

impl Scalar for C64 {
    fn approx_mag(&self) -> f64 {
        self.norm()
    }
}

impl Scalar for CQ {
    fn approx_mag(&self) -> f64 {
        cq_to_c64(self).norm()
    }
}

/// Exact conversion of an f64 into a rational. NaN and infinities are
/// rejected by the caller-visible constructors before reaching this point.
pub fn q_from_f64(x: f64) -> Q {
    BigRational::from_float(x).expect("finite float converts exactly")
}

pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Extremely large num/den pairs can overflow to_f64; fall back to a
        // ratio of leading digits.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY * q.numer().signum().to_f64().unwrap());
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn cq_from_c64(z: C64) -> CQ {
    Complex::new(q_from_f64(z.re), q_from_f64(z.im))
}

pub fn cq_to_c64(z: &CQ) -> C64 {
    Complex::new(q_to_f64(&z.re), q_to_f64(&z.im))
}

/// True when the value is real (zero imaginary part).
pub fn cq_is_real_rational(z: &CQ) -> bool {
    z.im.is_zero()
}
