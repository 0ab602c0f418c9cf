//! Exact arithmetic over the Gaussian rationals `Q(i)`.
//!
//! Every coefficient that appears in structure equations, coframes and the
//! linear algebra kernels is a [`GaussianRational`]: a pair of arbitrary
//! precision rationals. Nothing is ever rounded.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::syntax::{self, ParseError};

/// Arbitrary precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
}

/// `re + im * i` with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: Rational,
    im: Rational,
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    /// Builds `a/b + (c/d) i` from machine integers. Panics if a denominator is zero.
    pub fn from_fractions(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(rational(a, b), rational(c, d))
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(Rational::from_integer(n.into()), Rational::zero())
    }

    pub fn real(re: Rational) -> Self {
        Self::new(re, Rational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|^2 = re^2 + im^2`.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self * &rhs.inv()?)
    }

    /// True when the value would be written with a leading minus sign:
    /// negative real part, or zero real part and negative imaginary part.
    pub fn has_leading_minus(&self) -> bool {
        self.re.is_negative() || (self.re.is_zero() && self.im.is_negative())
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::default()
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::from_integer(1)
    }
}

impl From<Rational> for GaussianRational {
    fn from(re: Rational) -> Self {
        Self::real(re)
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Panics on division by zero, like the integer operators; use
/// [`GaussianRational::checked_div`] when the divisor is not known to be nonzero.
impl Div<GaussianRational> for GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: GaussianRational) -> GaussianRational {
        self.checked_div(&rhs).expect("division by zero")
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

pub(crate) fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical coefficient syntax: `a/b` when real, `(a/b)i` when purely
/// imaginary, `(a/b+c/di)` otherwise; `/1` is never written.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", format_rational(&self.re)),
            (true, false) if self.im.is_one() => f.write_str("i"),
            (true, false) if (-self.im.clone()).is_one() => f.write_str("-i"),
            (true, false) => write!(f, "({})i", format_rational(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(
                    f,
                    "({}{}{}i)",
                    format_rational(&self.re),
                    sign,
                    format_rational(&self.im.abs())
                )
            }
        }
    }
}

/// Parses a coefficient literal such as `-1/2`, `(1/2)i`, `3 i` or `(-1/2+1/2i)`.
pub fn parse_scalar(text: &str) -> Result<GaussianRational, ParseError> {
    syntax::parse_constant(text)
}

impl FromStr for GaussianRational {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_scalar(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64, c: i64, d: i64) -> GaussianRational {
        GaussianRational::from_fractions(a, b, c, d)
    }

    #[test]
    fn addition() {
        assert_eq!(g(1, 2, 0, 1) + g(1, 2, 0, 1), g(1, 1, 0, 1));
        let sum = g(0, 1, 1, 1) + g(0, 1, -1, 1);
        assert!(sum.is_zero());
        assert_eq!(sum, GaussianRational::zero());
        assert_eq!(g(1, 3, 1, 6) + g(1, 6, 1, 3), g(1, 2, 1, 2));
    }

    #[test]
    fn multiplication() {
        let i = GaussianRational::i();
        assert_eq!(&i * &i, g(-1, 1, 0, 1));
        assert_eq!(g(1, 2, 0, 1) * i.clone(), g(0, 1, 1, 2));
        assert_eq!(g(1, 1, -1, 1) * g(1, 1, 1, 1), g(2, 1, 0, 1));
    }

    #[test]
    fn inverse() {
        assert_eq!(GaussianRational::i().inv().unwrap(), g(0, 1, -1, 1));
        assert_eq!(g(0, 1, 2, 1).inv().unwrap(), g(0, 1, -1, 2));
        assert_eq!(g(1, 1, 1, 1).inv().unwrap(), g(1, 2, -1, 2));
        assert_eq!(GaussianRational::zero().inv(), Err(ScalarError::DivisionByZero));
    }

    #[test]
    fn conjugation() {
        assert_eq!(g(1, 2, 1, 2).conj(), g(1, 2, -1, 2));
        assert_eq!(g(3, 1, 0, 1).conj(), g(3, 1, 0, 1));
        let z = g(2, 7, -5, 1);
        assert_eq!(z.conj().conj(), z);
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_scalar("-1/2").unwrap(), g(-1, 2, 0, 1));
        assert_eq!(parse_scalar("(1/2)i").unwrap(), g(0, 1, 1, 2));
        assert_eq!(parse_scalar("(-1/2+1/2i)").unwrap(), g(-1, 2, 1, 2));
        assert_eq!(parse_scalar("i").unwrap(), GaussianRational::i());
        assert_eq!(parse_scalar("-i").unwrap(), -GaussianRational::i());
        assert_eq!(parse_scalar("3 i").unwrap(), g(0, 1, 3, 1));
        assert_eq!(parse_scalar("(2-3i)").unwrap(), g(2, 1, -3, 1));
        assert_eq!(parse_scalar("4/6").unwrap(), g(2, 3, 0, 1));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_scalar("1/0").unwrap_err();
        assert!(err.message.contains("zero"), "{err}");
        let err = parse_scalar("(1/2").unwrap_err();
        assert_eq!(err.offset, 4);
        let err = parse_scalar("1/2 x").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(parse_scalar("").is_err());
    }

    #[test]
    fn canonical_format() {
        assert_eq!(g(1, 2, 0, 1).to_string(), "1/2");
        assert_eq!(g(0, 1, 1, 2).to_string(), "(1/2)i");
        assert_eq!(g(0, 1, 1, 1).to_string(), "i");
        assert_eq!(g(0, 1, -1, 1).to_string(), "-i");
        assert_eq!(g(-1, 2, 1, 2).to_string(), "(-1/2+1/2i)");
        assert_eq!(g(1, 1, -2, 1).to_string(), "(1-2i)");
        assert_eq!(GaussianRational::zero().to_string(), "0");
        assert_eq!(g(-3, 1, 0, 1).to_string(), "-3");
    }
}
