use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms.
pub type Rational = num_rational::BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"n"` or `"n/d"` with `d > 0`. Surrounding whitespace is rejected.
pub fn parse_rational(text: &str) -> std::result::Result<Rational, String> {
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let numer: BigInt = parse_int(n).ok_or_else(|| format!("bad numerator in {text:?}"))?;
    let denom: BigInt = match d {
        Some(d) => {
            if d.starts_with(['-', '+']) {
                return Err(format!(
                    "denominator must be a positive integer in {text:?}"
                ));
            }
            parse_int(d).ok_or_else(|| format!("bad denominator in {text:?}"))?
        }
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(Rational::new(numer, denom))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Reduced `n` or `n/d` rendering, the inverse of [`parse_rational`].
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A nonnegative rational or `+inf`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtValue {
    Finite(Rational),
    Infinity,
}

impl ExtValue {
    pub fn zero() -> Self {
        ExtValue::Finite(Rational::zero())
    }

    pub fn finite(r: Rational) -> Result<Self> {
        if r.is_negative() {
            Err(Error::ExtArithmetic("extended values are nonnegative"))
        } else {
            Ok(ExtValue::Finite(r))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtValue::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtValue::Finite(r) if r.is_zero())
    }

    /// True for `0 < x < inf`.
    pub fn is_positive_finite(&self) -> bool {
        matches!(self, ExtValue::Finite(r) if r.is_positive())
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            ExtValue::Finite(r) => Some(r),
            ExtValue::Infinity => None,
        }
    }

    /// Finite over finite-positive only.
    pub fn div(&self, rhs: &ExtValue) -> Result<Rational> {
        match (self, rhs) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) if b.is_positive() => Ok(a / b),
            (_, ExtValue::Finite(_)) if !rhs.is_infinite() && rhs.is_zero() => {
                Err(Error::ExtArithmetic("division by zero"))
            }
            _ => Err(Error::ExtArithmetic("division involving infinity")),
        }
    }
}

impl Add for ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: ExtValue) -> ExtValue {
        match (self, rhs) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => ExtValue::Finite(a + b),
            _ => ExtValue::Infinity,
        }
    }
}

impl<'a> Add<&'a ExtValue> for ExtValue {
    type Output = ExtValue;

    fn add(self, rhs: &'a ExtValue) -> ExtValue {
        match (self, rhs) {
            (ExtValue::Finite(a), ExtValue::Finite(b)) => ExtValue::Finite(a + b),
            _ => ExtValue::Infinity,
        }
    }
}

impl Sum for ExtValue {
    fn sum<I: Iterator<Item = ExtValue>>(iter: I) -> Self {
        iter.fold(ExtValue::zero(), Add::add)
    }
}

impl<'a> Sum<&'a ExtValue> for ExtValue {
    fn sum<I: Iterator<Item = &'a ExtValue>>(iter: I) -> Self {
        iter.fold(ExtValue::zero(), |acc, v| acc + v)
    }
}

impl fmt::Debug for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Finite(r) => f.write_str(&format_rational(r)),
            ExtValue::Infinity => f.write_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("2/4").unwrap(), rational(1, 2));
        assert_eq!(parse_rational("-1/3").unwrap(), rational(-1, 3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational(" 1").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/").is_err());
    }

    #[test]
    fn format_is_reduced() {
        assert_eq!(format_rational(&parse_rational("6/8").unwrap()), "3/4");
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert_eq!(format_rational(&int(0)), "0");
    }

    #[test]
    fn infinity_absorbs() {
        let one = ExtValue::Finite(int(1));
        assert_eq!(one.clone() + ExtValue::Infinity, ExtValue::Infinity);
        assert_eq!(ExtValue::Infinity + one.clone(), ExtValue::Infinity);
        let s: ExtValue = [one.clone(), one.clone()].iter().sum();
        assert_eq!(s, ExtValue::Finite(int(2)));
    }

    #[test]
    fn division_rules() {
        let half = ExtValue::Finite(rational(1, 2));
        let two = ExtValue::Finite(int(2));
        assert_eq!(half.div(&two).unwrap(), rational(1, 4));
        assert!(half.div(&ExtValue::zero()).is_err());
        assert!(ExtValue::Infinity.div(&two).is_err());
        assert!(half.div(&ExtValue::Infinity).is_err());
        assert!(ExtValue::finite(int(-1)).is_err());
    }
}
