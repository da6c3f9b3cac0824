//! Arithmetic abstraction for the simplex engine: exact big rationals or
//! tolerance-aware floating point behind one pivoting implementation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dyadic::DyadicRational;

pub type Rational = BigRational;

pub trait Scalar:
    Clone + PartialOrd + std::fmt::Debug + Zero + One + 'static
{
    fn from_dyadic(d: &DyadicRational) -> Self;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    fn div_ref(&self, o: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn abs_ref(&self) -> Self;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_dyadic(d: &DyadicRational) -> Self {
        d.to_f64()
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn abs_ref(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Rational {
    fn from_dyadic(d: &DyadicRational) -> Self {
        d.to_rational()
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn div_ref(&self, o: &Self) -> Self {
        self / o
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn abs_ref(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Exact decimal rendering of a rational, rounded half-away-from-zero.
pub fn rational_decimal(r: &Rational, digits: u32) -> String {
    let sign = if r.is_negative() { "-" } else { "" };
    let num = r.numer().abs();
    let den = r.denom().abs();
    let scale = BigInt::from(10u32).pow(digits);
    // round(num * 10^d / den)
    let scaled = &num * &scale;
    let q = &scaled / &den;
    let rem = &scaled % &den;
    let q = if &rem * 2 >= den { q + 1 } else { q };
    let int_part = &q / &scale;
    let frac_part = &q % &scale;
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!(
            "{sign}{int_part}.{frac:0width$}",
            frac = frac_part,
            width = digits as usize
        )
    }
}
