//! Exact dyadic rationals `p / 2^q`.
//!
//! Every weight in the exponential domination problem is of this form, so all
//! weight sums, matrix entries and verification thresholds can be carried
//! without rounding. Values convert to [`BigRational`] for solver pivoting and
//! to `f64` only at reporting boundaries.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact number of the form `numerator / 2^exponent`.
///
/// Canonical form: the fraction is fully reduced, i.e. the numerator is odd
/// whenever the exponent is positive (zero is stored as `0 / 2^0`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: BigInt,
    exponent: u32,
}

impl DyadicRational {
    pub fn new(numerator: impl Into<BigInt>, exponent: u32) -> Self {
        let mut d = DyadicRational {
            numerator: numerator.into(),
            exponent,
        };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        DyadicRational {
            numerator: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        DyadicRational {
            numerator: BigInt::one(),
            exponent: 0,
        }
    }

    pub fn from_integer(v: i64) -> Self {
        DyadicRational {
            numerator: BigInt::from(v),
            exponent: 0,
        }
    }

    /// `(1/2)^k`.
    pub fn half_pow(k: u32) -> Self {
        DyadicRational {
            numerator: BigInt::one(),
            exponent: k,
        }
    }

    fn normalize(&mut self) {
        if self.numerator.is_zero() {
            self.exponent = 0;
            return;
        }
        while self.exponent > 0 && (&self.numerator % 2u8).is_zero() {
            self.numerator /= 2;
            self.exponent -= 1;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numerator.clone(), BigInt::one() << self.exponent)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }
}

impl Add for &DyadicRational {
    type Output = DyadicRational;

    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        let exp = self.exponent.max(rhs.exponent);
        let a = &self.numerator << (exp - self.exponent);
        let b = &rhs.numerator << (exp - rhs.exponent);
        DyadicRational::new(a + b, exp)
    }
}

impl Add for DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: DyadicRational) -> DyadicRational {
        &self + &rhs
    }
}

impl AddAssign<&DyadicRational> for DyadicRational {
    fn add_assign(&mut self, rhs: &DyadicRational) {
        *self = &*self + rhs;
    }
}

impl Sub for &DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: &DyadicRational) -> DyadicRational {
        self + &(-rhs.clone())
    }
}

impl Sub for DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: DyadicRational) -> DyadicRational {
        &self - &rhs
    }
}

impl Mul for &DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: &DyadicRational) -> DyadicRational {
        DyadicRational::new(
            &self.numerator * &rhs.numerator,
            self.exponent + rhs.exponent,
        )
    }
}

impl Mul for DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: DyadicRational) -> DyadicRational {
        &self * &rhs
    }
}

impl Neg for DyadicRational {
    type Output = DyadicRational;
    fn neg(mut self) -> DyadicRational {
        self.numerator = -self.numerator;
        self
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exponent.max(other.exponent);
        let a = &self.numerator << (exp - self.exponent);
        let b = &other.numerator << (exp - other.exponent);
        a.cmp(&b)
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.numerator, self.exponent)
    }
}

impl fmt::Debug for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid dyadic rational literal {0:?}, expected `p` or `p/2^q`")]
pub struct ParseDyadicError(String);

impl FromStr for DyadicRational {
    type Err = ParseDyadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseDyadicError(s.to_owned());
        match s.split_once('/') {
            None => {
                let n = BigInt::from_str(s.trim()).map_err(|_| bad())?;
                Ok(DyadicRational::new(n, 0))
            }
            Some((num, den)) => {
                let n = BigInt::from_str(num.trim()).map_err(|_| bad())?;
                let exp = den
                    .trim()
                    .strip_prefix("2^")
                    .and_then(|e| e.parse::<u32>().ok())
                    .ok_or_else(bad)?;
                Ok(DyadicRational::new(n, exp))
            }
        }
    }
}

impl Serialize for DyadicRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DyadicRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
