//! Exact rational helpers.
//!
//! Everything that decides an argmin is computed with [`Rational`] (arbitrary precision);
//! the helpers here cover parsing of user input ("1/8", "0.125", "2e-3"), floors, and the
//! `{num, den}` JSON form used by every exported file.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_u64(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q`, a plain integer, or a decimal literal (optionally with an exponent).
/// Decimals are converted digit by digit, so `0.1` is exactly `1/10`.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    let fail = |reason: &str| Error::ParseRational {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Err(fail("empty string"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num.trim()).ok_or_else(|| fail("bad numerator"))?;
        let den = parse_decimal(den.trim()).ok_or_else(|| fail("bad denominator"))?;
        if den.is_zero() {
            return Err(fail("zero denominator"));
        }
        return Ok(num / den);
    }
    parse_decimal(s).ok_or_else(|| fail("not a fraction or decimal literal"))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = match digits.split_once('.') {
        Some((w, f)) => (w, f),
        None => (digits, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{whole}{frac}");
    let mut value = Rational::from_integer(BigInt::from_str(&all_digits).ok()?);
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Largest integer `<= q`.
pub fn floor(q: &Rational) -> BigInt {
    q.numer().div_floor(q.denom())
}

/// Smallest integer `>= q`.
pub fn ceil(q: &Rational) -> BigInt {
    let (d, m) = q.numer().div_mod_floor(q.denom());
    if m.is_zero() {
        d
    } else {
        d + BigInt::one()
    }
}

pub fn floor_i64(q: &Rational) -> i64 {
    floor(q).to_i64().expect("floor out of i64 range")
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Very large operands: divide in f64 after scaling both to a common exponent.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact conversion of a finite `f64` into a rational.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn display(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

/// `{num, den}` JSON mirror of a rational. Components are JSON integers when they fit in
/// `i64` and decimal strings otherwise, so no digit is ever lost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactJson(pub Rational);

#[derive(Serialize, Deserialize)]
struct NumDen {
    num: IntJson,
    den: IntJson,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntJson {
    Small(i64),
    Big(String),
}

impl IntJson {
    fn from_big(v: &BigInt) -> Self {
        match v.to_i64() {
            Some(x) => IntJson::Small(x),
            None => IntJson::Big(v.to_string()),
        }
    }

    fn to_big(&self) -> std::result::Result<BigInt, String> {
        match self {
            IntJson::Small(x) => Ok(BigInt::from(*x)),
            IntJson::Big(s) => BigInt::from_str(s).map_err(|e| e.to_string()),
        }
    }
}

impl Serialize for ExactJson {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        NumDen {
            num: IntJson::from_big(self.0.numer()),
            den: IntJson::from_big(self.0.denom()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExactJson {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = NumDen::deserialize(deserializer)?;
        let num = raw.num.to_big().map_err(serde::de::Error::custom)?;
        let den = raw.den.to_big().map_err(serde::de::Error::custom)?;
        if den.is_zero() {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(ExactJson(Rational::new(num, den)))
    }
}

/// For `#[serde(with = "crate::rational::exact")]` on `Rational` fields.
pub mod exact {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExactJson(q.clone()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        Ok(ExactJson::deserialize(d)?.0)
    }
}

/// Same as [`exact`] for `Option<Rational>`.
pub mod exact_opt {
    use super::*;

    pub fn serialize<S: Serializer>(
        q: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        q.as_ref().map(|v| ExactJson(v.clone())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        Ok(Option::<ExactJson>::deserialize(d)?.map(|v| v.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rational("1/8").unwrap(), rat(1, 8));
        assert_eq!(parse_rational(" -3/6 ").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_rational("2.5e-2").unwrap(), rat(1, 40));
        assert_eq!(parse_rational("1e4").unwrap(), int(10_000));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "1/0", "abc", "1/x", "1..2", "-"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn floors_and_ceils() {
        assert_eq!(floor_i64(&rat(7, 2)), 3);
        assert_eq!(floor_i64(&rat(-7, 2)), -4);
        assert_eq!(ceil(&rat(7, 2)), BigInt::from(4));
        assert_eq!(ceil(&int(3)), BigInt::from(3));
    }

    #[test]
    fn json_round_trip_keeps_big_components() {
        let huge = Rational::new(
            BigInt::from_str("123456789012345678901234567890").unwrap(),
            BigInt::from(7),
        );
        for q in [rat(8, 11), huge] {
            let text = serde_json::to_string(&ExactJson(q.clone())).unwrap();
            let back: ExactJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back.0, q);
        }
        assert_eq!(
            serde_json::to_string(&ExactJson(rat(8, 11))).unwrap(),
            r#"{"num":8,"den":11}"#
        );
    }
}
