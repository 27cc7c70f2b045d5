//! Dense univariate polynomials in `t`, lowest degree first.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::Rational;

/// Integer polynomial; the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntegerPolynomial {
    coeffs: Vec<BigInt>,
}

/// Rational polynomial; the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse polynomial {input:?} at byte {position}: {reason}")]
pub struct PolyParseError {
    pub input: String,
    pub position: usize,
    pub reason: &'static str,
}

impl IntegerPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntegerPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntegerPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `t^k`
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = BigInt::one();
        IntegerPolynomial { coeffs }
    }

    /// `t - root`
    pub fn linear(root: i64) -> Self {
        Self::from_i64(&[-root, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn neg(&self) -> Self {
        IntegerPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Multiplies by -1 if needed so that the leading coefficient is positive.
    pub fn sign_normalized(&self) -> Self {
        match self.leading() {
            Some(l) if l.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }

    pub fn to_rational(&self) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().cloned().map(Rational::from).collect())
    }

    /// Exact quotient by a monic divisor, or `None` when it does not divide.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = self.to_rational().div_rem(&divisor.to_rational());
        if r.is_zero() {
            q.to_integer()
        } else {
            None
        }
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * t + c)
    }

    /// Best-effort factorization over the integers of a monic polynomial:
    /// powers of `t`, integer roots, then monic integer quadratics. Whatever
    /// remains is reported as a single factor. Factors with multiplicity.
    pub fn factor_small(&self) -> Vec<(IntegerPolynomial, u32)> {
        let mut rest = self.clone();
        let mut factors: Vec<(IntegerPolynomial, u32)> = Vec::new();
        if rest.degree().unwrap_or(0) == 0 {
            return vec![(rest, 1)];
        }
        let push = |f: IntegerPolynomial, factors: &mut Vec<(IntegerPolynomial, u32)>| {
            if let Some(entry) = factors.iter_mut().find(|(g, _)| *g == f) {
                entry.1 += 1;
            } else {
                factors.push((f, 1));
            }
        };

        let t = IntegerPolynomial::monomial(1);
        while rest.degree().unwrap_or(0) >= 1 && rest.coeffs[0].is_zero() {
            rest = IntegerPolynomial::new(rest.coeffs[1..].to_vec());
            push(t.clone(), &mut factors);
        }

        let bound = rest.root_bound();
        // Integer roots divide the constant term.
        let mut candidates: Vec<i64> = Vec::new();
        if let Some(c0) = rest.coeffs.first().and_then(|c| c.abs().to_i64()) {
            for d in 1..=c0.min(bound) {
                if c0 % d == 0 {
                    candidates.push(d);
                    candidates.push(-d);
                }
            }
        }
        for r in candidates {
            loop {
                if rest.degree().unwrap_or(0) < 1 || !rest.eval(&BigInt::from(r)).is_zero() {
                    break;
                }
                let f = IntegerPolynomial::linear(r);
                rest = rest.div_exact(&f).expect("root implies linear factor");
                push(f, &mut factors);
            }
        }

        if rest.degree().unwrap_or(0) >= 4 {
            let b_max = 2 * bound;
            let c_max = bound.saturating_mul(bound);
            let mut divisors: Vec<i64> = Vec::new();
            if let Some(c0) = rest.coeffs[0].abs().to_i64() {
                let mut d = 1;
                while d * d <= c0 && d <= 1_000_000 {
                    if c0 % d == 0 {
                        divisors.extend([d, c0 / d]);
                    }
                    d += 1;
                }
            }
            divisors.retain(|&d| d <= c_max);
            divisors.sort_unstable();
            divisors.dedup();
            let signed = divisors.iter().flat_map(|&d| [d, -d]).collect::<Vec<_>>();
            'search: for c in signed {
                for b in -b_max..=b_max {
                    let f = IntegerPolynomial::from_i64(&[c, b, 1]);
                    while rest.degree().unwrap_or(0) >= 4 {
                        match rest.div_exact(&f) {
                            Some(q) => {
                                rest = q;
                                push(f.clone(), &mut factors);
                            }
                            None => break,
                        }
                    }
                    if rest.degree().unwrap_or(0) < 4 {
                        break 'search;
                    }
                }
            }
        }
        if rest.degree().unwrap_or(0) >= 1 {
            push(rest, &mut factors);
        }
        factors.sort_by_key(|(f, _)| factor_order(f));
        factors
    }

    /// Cauchy bound on the modulus of the roots of a monic polynomial, capped.
    fn root_bound(&self) -> i64 {
        let lead = self.leading().cloned().unwrap_or_else(BigInt::one);
        let max = self
            .coeffs
            .iter()
            .take(self.coeffs.len().saturating_sub(1))
            .map(|c| (c.abs() + &lead - 1) / &lead)
            .max()
            .unwrap_or_else(BigInt::zero);
        (max + 1u32).to_i64().unwrap_or(i64::MAX).min(10_000)
    }

    /// Factored display such as `(t-2)(t+2)t^2`; falls back to the dense
    /// form for non-monic input.
    pub fn factored_string(&self) -> String {
        if !self.is_monic() {
            return self.to_string();
        }
        if self.degree() == Some(0) {
            return "1".to_string();
        }
        let mut out = String::new();
        for (f, mult) in self.factor_small() {
            let body = f.to_string();
            let power = if mult > 1 { format!("^{mult}") } else { String::new() };
            if f.degree() == Some(1) && f.coeffs[0].is_zero() {
                out.push_str(&format!("t{power}"));
            } else {
                out.push_str(&format!("({body}){power}"));
            }
        }
        out
    }

    /// Parses sums and products such as `(t+2)(t-1)(t+1)t^2`,
    /// `(t^2+2 t+2)t^3`, `(t+1)^2*t^3` or `t^5 - 5t^3 + 5t - 2`.
    pub fn parse(input: &str) -> Result<Self, PolyParseError> {
        let mut parser = PolyParser {
            input,
            bytes: input.as_bytes(),
            pos: 0,
        };
        let p = parser.sum()?;
        parser.skip_ws();
        if parser.pos != parser.bytes.len() {
            return Err(parser.fail("trailing input"));
        }
        Ok(p)
    }
}

fn factor_order(f: &IntegerPolynomial) -> (usize, bool, BigInt, Vec<BigInt>) {
    let deg = f.degree().unwrap_or(0);
    let is_t = deg == 1 && f.coeffs[0].is_zero();
    match deg {
        // Linear factors: largest root first, `t` itself last.
        1 => (if is_t { usize::MAX } else { 1 }, false, f.coeffs[0].clone(), Vec::new()),
        _ => (deg, false, BigInt::zero(), f.coeffs.clone()),
    }
}

impl fmt::Display for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(bool, String)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (c.is_negative(), term(&c.abs().to_string(), c.abs().is_one(), k)))
            .collect();
        write_terms(f, &terms)
    }
}

fn term(abs: &str, unit: bool, k: usize) -> String {
    let var = match k {
        0 => String::new(),
        1 => "t".to_string(),
        _ => format!("t^{k}"),
    };
    if k == 0 {
        abs.to_string()
    } else if unit {
        var
    } else {
        format!("{abs}{var}")
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[(bool, String)]) -> fmt::Result {
    if terms.is_empty() {
        return f.write_str("0");
    }
    for (i, (negative, body)) in terms.iter().enumerate() {
        match (i, negative) {
            (0, true) => write!(f, "-{body}")?,
            (0, false) => write!(f, "{body}")?,
            (_, true) => write!(f, "-{body}")?,
            (_, false) => write!(f, "+{body}")?,
        }
    }
    Ok(())
}

impl fmt::Debug for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerPolynomial({self})")
    }
}

struct PolyParser<'a> {
    input: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl PolyParser<'_> {
    fn fail(&self, reason: &'static str) -> PolyParseError {
        PolyParseError {
            input: self.input.to_string(),
            position: self.pos,
            reason,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn number(&mut self) -> Option<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.input[start..self.pos].parse().ok()
    }

    fn sum(&mut self) -> Result<IntegerPolynomial, PolyParseError> {
        let mut acc = IntegerPolynomial::zero();
        let mut first = true;
        loop {
            let negative = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => break,
            };
            first = false;
            let product = self.product()?;
            acc = add(&acc, &if negative { product.neg() } else { product });
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<IntegerPolynomial, PolyParseError> {
        let mut acc: Option<IntegerPolynomial> = None;
        loop {
            let factor = match self.peek() {
                Some(b'*') if acc.is_some() => {
                    self.pos += 1;
                    continue;
                }
                Some(b'(') => {
                    self.pos += 1;
                    let inner = self.sum()?;
                    if self.peek() != Some(b')') {
                        return Err(self.fail("expected `)`"));
                    }
                    self.pos += 1;
                    inner
                }
                Some(b't') => {
                    self.pos += 1;
                    IntegerPolynomial::monomial(1)
                }
                Some(c) if c.is_ascii_digit() => {
                    let v = self.number().ok_or_else(|| self.fail("bad number"))?;
                    IntegerPolynomial::new(vec![BigInt::from(v)])
                }
                _ => break,
            };
            let factor = if self.peek() == Some(b'^') || self.peek_pow() {
                self.pos += if self.bytes[self.pos] == b'^' { 1 } else { 2 };
                let e = self.number().ok_or_else(|| self.fail("bad exponent"))?;
                factor.pow(e as u32)
            } else {
                factor
            };
            acc = Some(match acc {
                Some(a) => a.mul(&factor),
                None => factor,
            });
        }
        acc.ok_or_else(|| self.fail("expected a factor"))
    }

    /// `**` as an exponent marker.
    fn peek_pow(&mut self) -> bool {
        self.skip_ws();
        self.bytes[self.pos..].starts_with(b"**")
    }
}

fn add(a: &IntegerPolynomial, b: &IntegerPolynomial) -> IntegerPolynomial {
    let len = a.coeffs.len().max(b.coeffs.len());
    let get = |p: &IntegerPolynomial, i: usize| p.coeffs.get(i).cloned().unwrap_or_default();
    IntegerPolynomial::new((0..len).map(|i| get(a, i) + get(b, i)).collect())
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| *c == Rational::one())
    }

    /// Polynomial long division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = divisor.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        let Some(nd) = self.degree().filter(|&nd| nd >= dd) else {
            return (Self::new(Vec::new()), self.clone());
        };
        let mut quot = vec![Rational::zero(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let coef = &rem[k + dd] * &lead_inv;
            if coef.is_zero() {
                continue;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = &rem[k + i] - &(&coef * d);
            }
            quot[k] = coef;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.div_rem(self).1.is_zero()
    }

    /// Integer polynomial when every coefficient is an integer.
    pub fn to_integer(&self) -> Option<IntegerPolynomial> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.numer().clone()))
            .collect::<Option<Vec<_>>>()
            .map(IntegerPolynomial::new)
    }

    pub fn factored_string(&self) -> String {
        match self.to_integer() {
            Some(p) => p.factored_string(),
            None => self.to_string(),
        }
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(bool, String)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let abs = if c.is_negative() { -c.clone() } else { c.clone() };
                let text = if abs.is_integer() {
                    abs.to_string()
                } else {
                    format!("({abs})")
                };
                (c.is_negative(), term(&text, abs == Rational::one(), k))
            })
            .collect();
        write_terms(f, &terms)
    }
}

impl fmt::Debug for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalPolynomial({self})")
    }
}

// Coefficient lists serialize as JSON numbers when they fit in an i64 and as
// strings otherwise.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coefficient {
    Small(i64),
    Text(String),
}

impl Serialize for IntegerPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let list: Vec<Coefficient> = self
            .coeffs
            .iter()
            .map(|c| match c.to_i64() {
                Some(v) => Coefficient::Small(v),
                None => Coefficient::Text(c.to_string()),
            })
            .collect();
        list.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntegerPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let list = Vec::<Coefficient>::deserialize(deserializer)?;
        let coeffs = list
            .into_iter()
            .map(|c| match c {
                Coefficient::Small(v) => Ok(BigInt::from(v)),
                Coefficient::Text(s) => s.parse::<BigInt>().map_err(D::Error::custom),
            })
            .collect::<Result<_, _>>()?;
        Ok(IntegerPolynomial::new(coeffs))
    }
}

impl Serialize for RationalPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let list: Vec<Coefficient> = self
            .coeffs
            .iter()
            .map(|c| match c.is_integer().then(|| c.numer().to_i64()).flatten() {
                Some(v) => Coefficient::Small(v),
                None => Coefficient::Text(c.to_string()),
            })
            .collect();
        list.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let list = Vec::<Coefficient>::deserialize(deserializer)?;
        let coeffs = list
            .into_iter()
            .map(|c| match c {
                Coefficient::Small(v) => Ok(Rational::from(v)),
                Coefficient::Text(s) => s.parse::<Rational>().map_err(D::Error::custom),
            })
            .collect::<Result<_, _>>()?;
        Ok(RationalPolynomial::new(coeffs))
    }
}

/// Serde adapter for integer lists using the same number-or-string
/// encoding as polynomial coefficients.
pub(crate) mod bigint_list {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[BigInt], serializer: S) -> Result<S::Ok, S::Error> {
        IntegerPolynomial { coeffs: values.to_vec() }.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<BigInt>, D::Error> {
        let list = Vec::<Coefficient>::deserialize(deserializer)?;
        list.into_iter()
            .map(|c| match c {
                Coefficient::Small(v) => Ok(BigInt::from(v)),
                Coefficient::Text(s) => s.parse::<BigInt>().map_err(D::Error::custom),
            })
            .collect()
    }
}
