//! Exact non-negative rational scalars.
//!
//! Every price, volume, supply level and amount of money on the discrete path
//! is a [`Qty`]. Arithmetic never rounds. Subtraction is only offered in
//! checked and saturating forms because the type cannot go negative.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact non-negative rational number.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Qty(BigRational);

// Most values in practice are integers or share a denominator; these skip the
// gcd that `BigRational` runs on every operation.
fn add_r(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() + b.numer())
    } else {
        a + b
    }
}

fn sub_r(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() - b.numer())
    } else {
        a - b
    }
}

fn mul_r(a: &BigRational, b: &BigRational) -> BigRational {
    if a.is_integer() && b.is_integer() {
        BigRational::from_integer(a.numer() * b.numer())
    } else {
        a * b
    }
}

impl Ord for Qty {
    fn cmp(&self, other: &Qty) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        if a.denom() == b.denom() {
            a.numer().cmp(b.numer())
        } else {
            (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
        }
    }
}

impl PartialOrd for Qty {
    fn partial_cmp(&self, other: &Qty) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Qty {
    pub fn zero() -> Self {
        Qty(BigRational::zero())
    }

    pub fn one() -> Self {
        Qty(BigRational::one())
    }

    /// Wraps a rational, rejecting negative values.
    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::Negative(value.to_string()));
        }
        Ok(Qty(value))
    }

    /// `numer / denom`; panics if `denom == 0`.
    pub fn from_ratio(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        Qty(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// Exact conversion of a finite, non-negative float (every f64 is a dyadic rational).
    pub fn from_f64(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "cannot represent {value} as a non-negative quantity"
            )));
        }
        BigRational::from_float(value)
            .map(Qty)
            .ok_or_else(|| Error::InvalidParameter(format!("cannot convert {value}")))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn checked_sub(&self, rhs: &Qty) -> Option<Qty> {
        let diff = sub_r(&self.0, &rhs.0);
        if diff.is_negative() {
            None
        } else {
            Some(Qty(diff))
        }
    }

    /// `max(self - rhs, 0)`.
    pub fn saturating_sub(&self, rhs: &Qty) -> Qty {
        if self <= rhs {
            Qty::zero()
        } else {
            Qty(sub_r(&self.0, &rhs.0))
        }
    }

    /// `|self - rhs|`.
    pub fn abs_diff(&self, rhs: &Qty) -> Qty {
        Qty(sub_r(&self.0, &rhs.0).abs())
    }

    pub fn checked_div(&self, rhs: &Qty) -> Option<Qty> {
        if rhs.is_zero() {
            None
        } else {
            Some(Qty(&self.0 / &rhs.0))
        }
    }

    pub fn recip(&self) -> Option<Qty> {
        Qty::one().checked_div(self)
    }

    /// True when the value has a finite decimal expansion.
    pub fn is_terminating_decimal(&self) -> bool {
        decimal_scale(self.0.denom()).is_some()
    }
}

/// Smallest `k` with `denom | 10^k`, if any.
fn decimal_scale(denom: &BigInt) -> Option<u32> {
    let mut d = denom.clone();
    let two = BigInt::from(2u8);
    let five = BigInt::from(5u8);
    let (mut twos, mut fives) = (0u32, 0u32);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    d.is_one().then_some(twos.max(fives))
}

impl From<u64> for Qty {
    fn from(value: u64) -> Self {
        Qty(BigRational::from_integer(BigInt::from(value)))
    }
}

impl From<u32> for Qty {
    fn from(value: u32) -> Self {
        Qty::from(u64::from(value))
    }
}

impl Add for Qty {
    type Output = Qty;
    fn add(self, rhs: Qty) -> Qty {
        Qty(add_r(&self.0, &rhs.0))
    }
}

impl<'a> Add<&'a Qty> for &'a Qty {
    type Output = Qty;
    fn add(self, rhs: &'a Qty) -> Qty {
        Qty(add_r(&self.0, &rhs.0))
    }
}

impl<'a> Add<&'a Qty> for Qty {
    type Output = Qty;
    fn add(self, rhs: &'a Qty) -> Qty {
        Qty(add_r(&self.0, &rhs.0))
    }
}

impl AddAssign<&Qty> for Qty {
    fn add_assign(&mut self, rhs: &Qty) {
        self.0 = add_r(&self.0, &rhs.0);
    }
}

impl AddAssign for Qty {
    fn add_assign(&mut self, rhs: Qty) {
        self.0 = add_r(&self.0, &rhs.0);
    }
}

impl Mul for Qty {
    type Output = Qty;
    fn mul(self, rhs: Qty) -> Qty {
        Qty(mul_r(&self.0, &rhs.0))
    }
}

impl<'a> Mul<&'a Qty> for &'a Qty {
    type Output = Qty;
    fn mul(self, rhs: &'a Qty) -> Qty {
        Qty(mul_r(&self.0, &rhs.0))
    }
}

impl<'a> Mul<&'a Qty> for Qty {
    type Output = Qty;
    fn mul(self, rhs: &'a Qty) -> Qty {
        Qty(mul_r(&self.0, &rhs.0))
    }
}

/// Panics on division by zero, like the integer types.
impl<'a> Div<&'a Qty> for &'a Qty {
    type Output = Qty;
    fn div(self, rhs: &'a Qty) -> Qty {
        self.checked_div(rhs).expect("division by zero quantity")
    }
}

impl Div for Qty {
    type Output = Qty;
    fn div(self, rhs: Qty) -> Qty {
        &self / &rhs
    }
}

impl Sum for Qty {
    fn sum<I: Iterator<Item = Qty>>(iter: I) -> Qty {
        iter.fold(Qty::zero(), |acc, q| acc + q)
    }
}

impl<'a> Sum<&'a Qty> for Qty {
    fn sum<I: Iterator<Item = &'a Qty>>(iter: I) -> Qty {
        iter.fold(Qty::zero(), |acc, q| acc + q)
    }
}

/// Canonical text form: a plain decimal (`12`, `0.25`) when the expansion
/// terminates, otherwise `numer/denom` in lowest terms. Never uses exponents.
impl fmt::Display for Qty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let numer = self.0.numer();
        let denom = self.0.denom();
        if denom.is_one() {
            return write!(f, "{numer}");
        }
        match decimal_scale(denom) {
            Some(scale) => {
                let pow = BigInt::from(10u8).pow(scale);
                let scaled = numer * (&pow / denom);
                let digits = scaled.to_string();
                let width = scale as usize;
                let padded = if digits.len() <= width {
                    format!("{}{}", "0".repeat(width + 1 - digits.len()), digits)
                } else {
                    digits
                };
                let (int_part, frac_part) = padded.split_at(padded.len() - width);
                let frac = frac_part.trim_end_matches('0');
                if frac.is_empty() {
                    write!(f, "{int_part}")
                } else {
                    write!(f, "{int_part}.{frac}")
                }
            }
            None => write!(f, "{numer}/{denom}"),
        }
    }
}

impl fmt::Debug for Qty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Qty({self})")
    }
}

/// Accepts `123`, `12.50` and `7/3`. Signs, exponents and whitespace are rejected.
impl FromStr for Qty {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid quantity {s:?}"));
        let digits = |part: &str| !part.is_empty() && part.bytes().all(|b| b.is_ascii_digit());
        if let Some((numer, denom)) = s.split_once('/') {
            if !digits(numer) || !digits(denom) {
                return Err(bad());
            }
            let numer: BigUint = numer.parse().map_err(|_| bad())?;
            let denom: BigUint = denom.parse().map_err(|_| bad())?;
            if denom.is_zero() {
                return Err(bad());
            }
            return Ok(Qty(BigRational::new(numer.into(), denom.into())));
        }
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, Some(f)),
            None => (s, None),
        };
        if !digits(int_part) || frac_part.is_some_and(|f| !digits(f)) {
            return Err(bad());
        }
        let frac = frac_part.unwrap_or("");
        let all: BigUint = format!("{int_part}{frac}").parse().map_err(|_| bad())?;
        let scale = BigUint::from(10u8).pow(frac.len() as u32);
        Ok(Qty(BigRational::new(all.into(), scale.into())))
    }
}

/// A quantity on the extended half-line `[0, ∞]`.
///
/// Used where the calculus produces `+∞`: generalized inverses beyond the
/// range of a function, depth beyond the available volume, and the upper
/// crossing bound of a book with no asks.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Extended {
    Finite(Qty),
    Infinite,
}

impl Extended {
    pub fn finite(&self) -> Option<&Qty> {
        match self {
            Extended::Finite(q) => Some(q),
            Extended::Infinite => None,
        }
    }

    pub fn into_finite(self) -> Option<Qty> {
        match self {
            Extended::Finite(q) => Some(q),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }
}

impl From<Qty> for Extended {
    fn from(q: Qty) -> Self {
        Extended::Finite(q)
    }
}

impl PartialEq<Qty> for Extended {
    fn eq(&self, other: &Qty) -> bool {
        matches!(self, Extended::Finite(q) if q == other)
    }
}

impl PartialOrd<Qty> for Extended {
    fn partial_cmp(&self, other: &Qty) -> Option<Ordering> {
        Some(match self {
            Extended::Finite(q) => q.cmp(other),
            Extended::Infinite => Ordering::Greater,
        })
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(q) => q.fmt(f),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}
