//! Exact rational numbers and their text forms.
//!
//! Weights, valuation payloads and the fairness parameters are all exact
//! rationals. On the wire they are strings such as `"3/4"` or `"2"`; decimal
//! strings like `"0.25"` are converted exactly (to `1/4`), never through a
//! binary float.

use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"`, an integer, or a decimal such as `"-1.25"` / `"3e-2"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::BadRational(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e = i32::from_str(&s[pos + 1..]).map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{whole}{frac}");
    let numer = BigInt::from_str(&all_digits).map_err(|_| bad())?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

pub fn in_unit_interval(q: &Rational) -> bool {
    !q.is_negative() && *q <= Rational::one()
}

pub fn check_unit(name: &'static str, q: &Rational) -> Result<()> {
    if in_unit_interval(q) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value: q.to_string(),
        })
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    use num::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

struct RationalVisitor;

impl Visitor<'_> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("a rational as \"p/q\", a decimal string, or a JSON number")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
        parse_rational(v).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
        Ok(int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
        Ok(Rational::from_integer(BigInt::from(v)))
    }

    // JSON floats go through their shortest decimal rendering, so 1.9 means 19/10.
    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Rational, E> {
        if !v.is_finite() {
            return Err(E::custom("non-finite number"));
        }
        parse_rational(&format!("{v:?}")).map_err(E::custom)
    }
}

/// `#[serde(with = "rational::string")]` for a single rational.
pub mod string {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        d.deserialize_any(RationalVisitor)
    }
}

/// `#[serde(with = "rational::string_vec")]` for a list of rationals.
pub mod string_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::Deserialize;

    struct Item(Rational);

    impl<'de> Deserialize<'de> for Item {
        fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
            d.deserialize_any(RationalVisitor).map(Item)
        }
    }

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&q.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let items: Vec<Item> = Vec::deserialize(d)?;
        Ok(items.into_iter().map(|i| i.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("1.9").unwrap(), ratio(19, 10));
        assert_eq!(parse_rational("-2").unwrap(), int(-2));
        assert_eq!(parse_rational("25e-2").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational(" 6/4 ").unwrap(), ratio(3, 2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "1/0", "abc", "1.2.3", "-", "1/x", "."] {
            assert!(parse_rational(s).is_err(), "{s} should not parse");
        }
    }

    #[test]
    fn json_float_is_read_through_its_decimal_form() {
        #[derive(serde::Deserialize)]
        struct W {
            #[serde(with = "string")]
            q: Rational,
        }
        let w: W = serde_json::from_str(r#"{"q": 1.9}"#).unwrap();
        assert_eq!(w.q, ratio(19, 10));
        let w: W = serde_json::from_str(r#"{"q": "7/3"}"#).unwrap();
        assert_eq!(w.q, ratio(7, 3));
    }
}
