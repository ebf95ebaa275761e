//! The exact scalar abstraction every solver is generic over.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::iter::Sum;
use std::ops::{AddAssign, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use crate::rational::{parse_big, Rational};

/// An exact ordered field. Floating point types deliberately do not qualify:
/// solvers branch on exact equalities such as `C_j = r_j'`.
pub trait Scalar:
    Clone
    + Ord
    + Hash
    + Debug
    + Display
    + Num
    + Signed
    + FromPrimitive
    + AddAssign
    + SubAssign
    + Sum
    + Send
    + Sync
    + 'static
{
    fn from_frac(num: i64, den: i64) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_frac(n, 1)
    }

    fn floor(&self) -> Self;
    fn ceil(&self) -> Self;
    fn is_integer(&self) -> bool;

    /// Lossy conversion, for rendering only.
    fn to_f64(&self) -> f64;

    /// Parses `"p/q"`, an integer or a finite decimal exactly.
    fn parse_exact(s: &str) -> Option<Self>;
}

impl Scalar for Rational {
    fn from_frac(num: i64, den: i64) -> Self {
        Rational::new(num, den)
    }
    fn floor(&self) -> Self {
        Rational::floor(self)
    }
    fn ceil(&self) -> Self {
        Rational::ceil(self)
    }
    fn is_integer(&self) -> bool {
        Rational::is_integer(self)
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
    fn parse_exact(s: &str) -> Option<Self> {
        Rational::from_str(s).ok()
    }
}

impl Scalar for BigRational {
    fn from_frac(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn floor(&self) -> Self {
        BigRational::floor(self)
    }
    fn ceil(&self) -> Self {
        BigRational::ceil(self)
    }
    fn is_integer(&self) -> bool {
        BigRational::is_integer(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn parse_exact(s: &str) -> Option<Self> {
        parse_big(s).ok()
    }
}

/// A scalar extended by two infinities. Variant order gives the right total order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T> Extended<T> {
    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }
}

impl<T: Scalar> Extended<T> {
    /// `a - self` with `a` finite; infinities flip sign.
    pub fn sub_from(&self, a: &T) -> Extended<T> {
        match self {
            Extended::NegInf => Extended::PosInf,
            Extended::PosInf => Extended::NegInf,
            Extended::Finite(t) => Extended::Finite(a.clone() - t.clone()),
        }
    }

    /// `self - a` with `a` finite.
    pub fn minus(&self, a: &T) -> Extended<T> {
        match self {
            Extended::Finite(t) => Extended::Finite(t.clone() - a.clone()),
            other => other.clone(),
        }
    }
}

impl<T> From<T> for Extended<T> {
    fn from(t: T) -> Self {
        Extended::Finite(t)
    }
}

impl<T: Display> Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => f.write_str("-inf"),
            Extended::PosInf => f.write_str("inf"),
            Extended::Finite(t) => Display::fmt(t, f),
        }
    }
}

impl<T: Debug> Debug for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => f.write_str("-inf"),
            Extended::PosInf => f.write_str("inf"),
            Extended::Finite(t) => Debug::fmt(t, f),
        }
    }
}
