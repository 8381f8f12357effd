//! Exact arithmetic over the parameter axis.
//!
//! Every quantity that depends on λ (item weights, ratio functions, path
//! lengths) is an [`AffineForm`] with [`Rational`] coefficients, and every
//! breakpoint is an exact [`Rational`]. Nothing in the solver core touches
//! floating point.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        let denom = denom.into();
        assert!(!denom.is_zero(), "zero denominator");
        Rational(BigRational::new(numer.into(), denom))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn signum(&self) -> Ordering {
        self.0.numer().sign().cmp(&num_bigint::Sign::NoSign)
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    pub fn ceil(&self) -> BigInt {
        self.0.numer().div_ceil(self.0.denom())
    }

    pub fn pow(&self, exp: u32) -> Self {
        Rational(num_traits::pow(self.0.clone(), exp as usize))
    }

    /// Midpoint of `self` and `other`.
    pub fn midpoint(&self, other: &Rational) -> Self {
        (self + other) / &Rational::from_integer(2)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Accepts `"n"`, `"n/d"` and plain decimals such as `"-0.25"` or `"1e-3"`.
/// Decimals are converted exactly.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational number: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(Rational::new(n, d));
        }
        let (mantissa, exp) = match s.find(['e', 'E']) {
            Some(i) => {
                let e: i32 = s[i + 1..].parse().map_err(|_| bad())?;
                (&s[..i], e)
            }
            None => (s, 0),
        };
        let (neg, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
        let scale = exp - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let mut r = if scale >= 0 {
            Rational::from_integer(all * num_traits::pow(ten, scale as usize))
        } else {
            Rational::new(all, num_traits::pow(ten, (-scale) as usize))
        };
        if neg {
            r = -r;
        }
        Ok(r)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A rational extended by ±∞. Variant order gives the total order
/// `NegInf < Finite(_) < PosInf`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtRational {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl ExtRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }
}

impl From<Rational> for ExtRational {
    fn from(r: Rational) -> Self {
        ExtRational::Finite(r)
    }
}

impl PartialEq<Rational> for ExtRational {
    fn eq(&self, other: &Rational) -> bool {
        matches!(self, ExtRational::Finite(r) if r == other)
    }
}

impl PartialOrd<Rational> for ExtRational {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(match self {
            ExtRational::NegInf => Ordering::Less,
            ExtRational::PosInf => Ordering::Greater,
            ExtRational::Finite(r) => r.cmp(other),
        })
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::NegInf => f.write_str("-inf"),
            ExtRational::PosInf => f.write_str("+inf"),
            ExtRational::Finite(r) => fmt::Display::fmt(r, f),
        }
    }
}

impl FromStr for ExtRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "-inf" => Ok(ExtRational::NegInf),
            "+inf" | "inf" => Ok(ExtRational::PosInf),
            other => other.parse().map(ExtRational::Finite),
        }
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The affine function `λ ↦ intercept + λ·slope`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct AffineForm {
    #[serde(rename = "alpha")]
    pub intercept: Rational,
    #[serde(rename = "beta")]
    pub slope: Rational,
}

impl AffineForm {
    pub fn new(intercept: Rational, slope: Rational) -> Self {
        AffineForm { intercept, slope }
    }

    pub fn from_ints(intercept: i64, slope: i64) -> Self {
        AffineForm::new(intercept.into(), slope.into())
    }

    pub fn zero() -> Self {
        AffineForm::default()
    }

    pub fn eval(&self, lambda: &Rational) -> Rational {
        &self.intercept + lambda * &self.slope
    }

    /// The unique crossing point with `other`, or `None` when the slopes
    /// agree (parallel or identical lines).
    pub fn intersect(&self, other: &AffineForm) -> Option<Rational> {
        let ds = &self.slope - &other.slope;
        if ds.is_zero() {
            return None;
        }
        Some((&other.intercept - &self.intercept) / ds)
    }

    /// The λ at which the form equals `level`, if the slope is nonzero.
    pub fn solve_for(&self, level: &Rational) -> Option<Rational> {
        if self.slope.is_zero() {
            return None;
        }
        Some((level - &self.intercept) / &self.slope)
    }

    pub fn scale(&self, factor: &Rational) -> AffineForm {
        AffineForm::new(&self.intercept * factor, &self.slope * factor)
    }
}

impl Add<&AffineForm> for &AffineForm {
    type Output = AffineForm;
    fn add(self, rhs: &AffineForm) -> AffineForm {
        AffineForm::new(&self.intercept + &rhs.intercept, &self.slope + &rhs.slope)
    }
}

impl Add<&AffineForm> for AffineForm {
    type Output = AffineForm;
    fn add(self, rhs: &AffineForm) -> AffineForm {
        AffineForm::new(self.intercept + &rhs.intercept, self.slope + &rhs.slope)
    }
}

impl Sub<&AffineForm> for &AffineForm {
    type Output = AffineForm;
    fn sub(self, rhs: &AffineForm) -> AffineForm {
        AffineForm::new(&self.intercept - &rhs.intercept, &self.slope - &rhs.slope)
    }
}

/// `{λ : lo ≤ λ ≤ hi}`; infinite endpoints are open.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct ClosedInterval {
    pub lo: ExtRational,
    pub hi: ExtRational,
}

impl ClosedInterval {
    pub fn new(lo: ExtRational, hi: ExtRational) -> Result<Self, Error> {
        if lo > hi || lo == ExtRational::PosInf || hi == ExtRational::NegInf {
            return Err(Error::Contract(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(ClosedInterval { lo, hi })
    }

    pub fn whole_line() -> Self {
        ClosedInterval { lo: ExtRational::NegInf, hi: ExtRational::PosInf }
    }

    pub fn left_ray(hi: Rational) -> Self {
        ClosedInterval { lo: ExtRational::NegInf, hi: hi.into() }
    }

    pub fn right_ray(lo: Rational) -> Self {
        ClosedInterval { lo: lo.into(), hi: ExtRational::PosInf }
    }

    pub fn contains(&self, lambda: &Rational) -> bool {
        self.lo <= *lambda && self.hi >= *lambda
    }

    pub fn contains_interval(&self, other: &ClosedInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Intersection, or `None` if empty.
    pub fn intersect(&self, other: &ClosedInterval) -> Option<ClosedInterval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        ClosedInterval::new(lo, hi).ok()
    }

    pub fn is_point(&self) -> bool {
        self.lo.is_finite() && self.lo == self.hi
    }
}

impl fmt::Display for ClosedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
