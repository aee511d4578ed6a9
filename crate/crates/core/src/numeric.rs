//! Exact rational arithmetic behind REAL, PQ values and TS offsets.
//!
//! Canonicalizing `1 l` and `1 dm3` must give the same number. With binary
//! floating point `0.1^3 != 0.001`; with [`Rational`] it holds exactly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::nullflavor::NullFlavor;

/// Arbitrary-precision signed rational, always reduced with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Rational {
        Rational(BigRational::zero())
    }

    pub fn one() -> Rational {
        Rational(BigRational::one())
    }

    pub fn from_integer(n: i64) -> Rational {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn new(numer: i64, denom: i64) -> Result<Rational> {
        if denom == 0 {
            return Err(Error::DivideByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom.into())))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Result<Rational> {
        if denom.is_zero() {
            return Err(Error::DivideByZero);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    /// `10^exp` for any signed exponent.
    pub fn pow10(exp: i32) -> Rational {
        let p = BigInt::from(10u32).pow(exp.unsigned_abs());
        if exp >= 0 {
            Rational(BigRational::from_integer(p))
        } else {
            Rational(BigRational::new(BigInt::one(), p))
        }
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

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Rational> {
        if self.is_zero() {
            return Err(Error::DivideByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational> {
        if rhs.is_zero() {
            return Err(Error::DivideByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn pow(&self, exp: i32) -> Result<Rational> {
        if exp < 0 && self.is_zero() {
            return Err(Error::DivideByZero);
        }
        Ok(Rational(num_traits::Pow::pow(&self.0, exp)))
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
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

    /// When the denominator is `2^a * 5^b`, the number of fractional digits in
    /// the exact decimal expansion.
    pub fn terminating_digits(&self) -> Option<u32> {
        let mut d = self.denom().clone();
        let two = BigInt::from(2u32);
        let five = BigInt::from(5u32);
        let (mut a, mut b) = (0u32, 0u32);
        while d.is_even() {
            d /= &two;
            a += 1;
        }
        while (&d % &five).is_zero() {
            d /= &five;
            b += 1;
        }
        d.is_one().then_some(a.max(b))
    }

    /// Decimal string: exact when the expansion terminates, otherwise rounded
    /// half-even to `max_frac_digits`. Trailing zeros are dropped.
    pub fn to_decimal_string(&self, max_frac_digits: u32) -> String {
        let digits = self.terminating_digits().unwrap_or(max_frac_digits);
        let scaled = &self.0 * BigRational::from_integer(BigInt::from(10u32).pow(digits));
        let units = round_half_even(&scaled);
        format_scaled(&units, digits)
    }
}

fn round_half_even(r: &BigRational) -> BigInt {
    let floor = r.floor().to_integer();
    let frac = r - BigRational::from_integer(floor.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2u32));
    match frac.cmp(&half) {
        Ordering::Less => floor,
        Ordering::Greater => floor + 1,
        Ordering::Equal => {
            if floor.is_even() {
                floor
            } else {
                floor + 1
            }
        }
    }
}

fn format_scaled(units: &BigInt, digits: u32) -> String {
    let neg = units.sign() == Sign::Minus;
    let mut s = units.abs().to_string();
    if digits > 0 {
        let d = digits as usize;
        if s.len() <= d {
            s = format!("{}{}", "0".repeat(d + 1 - s.len()), s);
        }
        s.insert(s.len() - d, '.');
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        s = trimmed.to_string();
    }
    if neg && s != "0" {
        s.insert(0, '-');
    }
    s
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Prints `n` or `n/d`.
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Accepts a decimal literal (see [`parse_decimal`]) or `n/d`.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n
                .trim()
                .parse()
                .map_err(|_| Error::parse("rational", s, "bad numerator"))?;
            let d: BigInt = d
                .trim()
                .parse()
                .map_err(|_| Error::parse("rational", s, "bad denominator"))?;
            return Rational::from_bigints(n, d);
        }
        parse_decimal(t).map(|(r, _)| r)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($tr::$method(&self.0, &rhs.0))
            }
        }
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($tr::$method(self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

/// Panics on a zero divisor; use [`Rational::checked_div`] for untrusted input.
impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        self.checked_div(rhs).expect("division by zero")
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

impl From<i64> for Rational {
    fn from(n: i64) -> Rational {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Rational {
        Rational(BigRational::from_integer(n))
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

/// Length in bytes of the longest decimal-literal prefix of `s`
/// (`[+-]digits[.digits][e[+-]digits]`), or 0 when there is none. The
/// exponent is only consumed when at least one digit follows the `e`.
pub(crate) fn decimal_prefix_len(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    if i == int_start {
        return 0;
    }
    if i + 1 < b.len() && b[i] == b'.' && b[i + 1].is_ascii_digit() {
        i += 1;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let exp_start = j;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        if j > exp_start {
            i = j;
        }
    }
    i
}

/// Parses a decimal literal exactly. Returns the value and the number of
/// significant digits in the mantissa (at least 1).
pub fn parse_decimal(s: &str) -> Result<(Rational, u32)> {
    let t = s.trim();
    if t.is_empty() || decimal_prefix_len(t) != t.len() {
        return Err(Error::parse("REAL", s, "expected [sign]digits[.digits][e[sign]digits]"));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(p) => (
            &t[..p],
            t[p + 1..]
                .parse::<i32>()
                .map_err(|_| Error::parse("REAL", s, "exponent out of range"))?,
        ),
        None => (t, 0),
    };
    let (neg, unsigned) = match mantissa.as_bytes()[0] {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = unsigned.split_once('.').unwrap_or((unsigned, ""));
    let digits = format!("{int_part}{frac_part}");
    let significant = digits.trim_start_matches('0').len().max(1) as u32;
    let mut units: BigInt = digits.parse().map_err(|_| Error::parse("REAL", s, "bad digits"))?;
    if neg {
        units = -units;
    }
    let value = Rational::from(units) * Rational::pow10(exp - frac_part.len() as i32);
    Ok((value, significant))
}

/// REAL: a rational value or a nullflavor. Literal-derived values remember
/// their number of significant digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Real {
    Value { value: Rational, precision: Option<u32> },
    Null(NullFlavor),
}

pub const DEFAULT_FRAC_DIGITS: u32 = 12;

impl Real {
    pub fn new(value: Rational) -> Real {
        Real::Value { value, precision: None }
    }

    pub fn parse(s: &str) -> Result<Real> {
        if let Ok(nf) = NullFlavor::parse(s) {
            return Ok(Real::Null(nf));
        }
        let (value, p) = parse_decimal(s)?;
        Ok(Real::Value {
            value,
            precision: Some(p),
        })
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            Real::Value { value, .. } => Some(value),
            Real::Null(_) => None,
        }
    }

    pub fn precision(&self) -> Option<u32> {
        match self {
            Real::Value { precision, .. } => *precision,
            Real::Null(_) => None,
        }
    }

    /// Exact decimal when possible, else rounded to `max_frac_digits`. When a
    /// precision is recorded and the value terminates, trailing zeros are
    /// padded back so `-2.50` prints as written.
    pub fn print(&self, max_frac_digits: u32) -> String {
        let (value, precision) = match self {
            Real::Null(nf) => return nf.to_string(),
            Real::Value { value, precision } => (value, *precision),
        };
        let mut s = value.to_decimal_string(max_frac_digits);
        if let (Some(p), Some(_)) = (precision, value.terminating_digits()) {
            let sig = significant_digits(&s);
            if sig < p as usize {
                if !s.contains('.') {
                    s.push('.');
                }
                s.push_str(&"0".repeat(p as usize - sig));
            }
        }
        s
    }
}

fn significant_digits(s: &str) -> usize {
    let digits: String = s.chars().filter(|c| c.is_ascii_digit()).collect();
    let trimmed = digits.trim_start_matches('0');
    if trimmed.is_empty() {
        // zero: count every printed digit
        digits.len().max(1)
    } else {
        trimmed.len()
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.print(DEFAULT_FRAC_DIGITS))
    }
}

impl FromStr for Real {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Real::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parse_literals() {
        assert_eq!(parse_decimal("0.001").unwrap(), (Rational::new(1, 1000).unwrap(), 1));
        assert_eq!(parse_decimal("-2.50").unwrap(), (Rational::new(-5, 2).unwrap(), 3));
        assert_eq!(parse_decimal("1e3").unwrap(), (Rational::from(1000), 1));
        assert_eq!(parse_decimal("+12.5E-1").unwrap().0, Rational::new(5, 4).unwrap());
        for bad in ["", "-", "1.", ".5", "1e", "1.2.3", "abc", "1 2"] {
            assert!(parse_decimal(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn float_counterexample_is_exact() {
        let tenth = r("0.1");
        assert_eq!(tenth.pow(3).unwrap(), r("0.001"));
        assert_ne!(0.1f64.powi(3), 0.001f64);
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(&r("1/3") + &r("2/3"), Rational::one());
        let big = r("133322387415/1000000000");
        // gcd(133322387415, 10^9) = 5
        assert_eq!(big.numer(), &BigInt::from(26664477483u64));
        assert_eq!(big.denom(), &BigInt::from(200000000u64));
        assert_eq!(r("1").checked_div(&Rational::zero()), Err(Error::DivideByZero));
        assert_eq!(Rational::zero().pow(-1), Err(Error::DivideByZero));
        assert_eq!(r("2").pow(-2).unwrap(), r("0.25"));
    }

    #[test]
    fn printing() {
        assert_eq!(r("3/25").to_decimal_string(12), "0.12");
        assert_eq!(Rational::zero().to_decimal_string(12), "0");
        assert_eq!(r("1/3").to_decimal_string(4), "0.3333");
        assert_eq!(r("2/3").to_decimal_string(4), "0.6667");
        assert_eq!(r("-1/8").to_decimal_string(0), "-0.125");
        assert_eq!(r("1/6").to_decimal_string(0), "0");
        // ties go to even
        assert_eq!(r("1/16").to_decimal_string(3), "0.0625");
        assert_eq!(Real::parse("-2.50").unwrap().to_string(), "-2.50");
        assert_eq!(Real::parse("0.001").unwrap().to_string(), "0.001");
        assert_eq!(Real::parse("nav").unwrap().to_string(), "nav");
    }

    #[test]
    fn half_even_ties() {
        let x = Rational::new(5, 2).unwrap();
        assert_eq!(round_half_even(x.as_big()), BigInt::from(2));
        let y = Rational::new(7, 2).unwrap();
        assert_eq!(round_half_even(y.as_big()), BigInt::from(4));
        let z = Rational::new(-5, 2).unwrap();
        assert_eq!(round_half_even(z.as_big()), BigInt::from(-2));
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-10_000i64..10_000, 1i64..500).prop_map(|(n, d)| Rational::new(n, d).unwrap())
    }

    fn arb_decimal() -> impl Strategy<Value = Rational> {
        (-1_000_000_000i64..1_000_000_000, 0i32..9).prop_map(|(n, e)| Rational::from(n) * Rational::pow10(-e))
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !b.is_zero() {
                prop_assert_eq!(&a.checked_div(&b).unwrap() * &b, a.clone());
            }
        }

        #[test]
        fn decimal_roundtrip(x in arb_decimal()) {
            let s = x.to_decimal_string(0);
            prop_assert_eq!(parse_decimal(&s).unwrap().0, x);
        }

        #[test]
        fn always_reduced(a in arb_rational(), b in arb_rational()) {
            let p = &a * &b;
            prop_assert!(p.denom() > &BigInt::zero());
            prop_assert!(p.numer().gcd(p.denom()).is_one());
        }
    }
}
