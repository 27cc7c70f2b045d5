//! Exact rational numbers used for every distance and Gromov product.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An arbitrary-precision fraction, always kept in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {literal:?}: {reason}")]
pub struct ParseRationalError {
    pub literal: String,
    pub reason: &'static str,
}

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(value.into()))
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

    pub fn halve(&self) -> Self {
        Rational(&self.0 / BigRational::from_integer(BigInt::from(2)))
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(value: BigRational) -> Self {
        Rational(value)
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::from_integer(value)
    }
}

impl From<u64> for Rational {
    fn from(value: u64) -> Self {
        Rational::from_integer(value)
    }
}

impl From<BigInt> for Rational {
    fn from(value: BigInt) -> Self {
        Rational::from_integer(value)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p/q`, signed integers and finite decimals (`1.25`, `-.5`).
    /// Decimals are converted exactly: `1.5` becomes `3/2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let fail = |reason| ParseRationalError {
            literal: s.to_string(),
            reason,
        };
        if text.is_empty() {
            return Err(fail("empty"));
        }
        if let Some((p, q)) = text.split_once('/') {
            let numer = parse_int(p.trim()).ok_or_else(|| fail("bad numerator"))?;
            let denom = parse_int(q.trim()).ok_or_else(|| fail("bad denominator"))?;
            if denom.is_zero() {
                return Err(fail("zero denominator"));
            }
            return Ok(Rational::new(numer, denom));
        }
        if let Some((whole, frac)) = text.split_once('.') {
            let (negative, whole) = match whole.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, whole.strip_prefix('+').unwrap_or(whole)),
            };
            let digits_ok = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
            if !digits_ok(whole) || !digits_ok(frac) || (whole.is_empty() && frac.is_empty()) {
                return Err(fail("bad decimal"));
            }
            let mut numer = if whole.is_empty() {
                BigInt::zero()
            } else {
                whole.parse::<BigInt>().map_err(|_| fail("bad decimal"))?
            };
            let mut denom = BigInt::one();
            for digit in frac.bytes() {
                numer = numer * 10 + BigInt::from(digit - b'0');
                denom *= 10;
            }
            if negative {
                numer = -numer;
            }
            return Ok(Rational::new(numer, denom));
        }
        parse_int(text)
            .map(Rational::from_integer)
            .ok_or_else(|| fail("not a number"))
    }
}

fn parse_int(text: &str) -> Option<BigInt> {
    let body = text.strip_prefix(['-', '+']).unwrap_or(text);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
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

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!(r("3"), Rational::from_integer(3));
        assert_eq!(r("-4"), Rational::from_integer(-4));
        assert_eq!(r("6/4"), Rational::new(3, 2));
        assert_eq!(r("1.5"), Rational::new(3, 2));
        assert_eq!(r("0.125"), Rational::new(1, 8));
        assert_eq!(r("-.5"), Rational::new(-1, 2));
        assert_eq!(r("2."), Rational::from_integer(2));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "abc", "1e3", "1.2.3", ".", "--1", "1/", "nan"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn lowest_terms_and_display() {
        assert_eq!(r("10/-4").to_string(), "-5/2");
        assert_eq!(r("8/4").to_string(), "2");
        assert_eq!(r("3").halve().to_string(), "3/2");
    }
}
