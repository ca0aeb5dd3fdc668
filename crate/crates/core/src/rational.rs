//! Exact rational weights.
//!
//! Weights, fields and couplings are kept as `Ratio<i64>` so that degenerate
//! problem-energy levels can be grouped without any floating tolerance. Values
//! are written to files as exact decimal strings when the expansion terminates
//! and as `"num/den"` otherwise.

use std::fmt::Write as _;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(v)
}

pub fn to_f64(r: &Rational) -> f64 {
    // numer/denom individually are exact in f64 for the magnitudes used here
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Parses `"7"`, `"-2"`, `"1.8"`, `"9/5"` or `"1e-3"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {text:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = t.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = t[pos + 1..].parse().map_err(|_| bad())?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
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
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: i64 = all_digits.parse().map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let shift = exponent - frac_part.len() as i32;
    let pow = |p: u32| 10i64.checked_pow(p).ok_or_else(bad);
    let value = if shift >= 0 {
        Rational::from_integer(numer.checked_mul(pow(shift as u32)?).ok_or_else(bad)?)
    } else {
        Rational::new(numer, pow((-shift) as u32)?)
    };
    Ok(value)
}

/// Exact decimal rendering (`"5.4"`, `"-12"`, `"0.036"`), or `"p/q"` when the
/// decimal expansion does not terminate.
pub fn format_exact(r: &Rational) -> String {
    let mut den = *r.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = twos.max(fives);
    if places == 0 {
        return r.numer().to_string();
    }
    let scale = 10i128.pow(places);
    let scaled = (*r.numer() as i128) * scale / (*r.denom() as i128);
    let sign = if scaled < 0 { "-" } else { "" };
    let abs = scaled.abs();
    let whole = abs / scale;
    let mut frac = format!("{:0width$}", abs % scale, width = places as usize);
    while frac.ends_with('0') {
        frac.pop();
    }
    let mut out = String::new();
    let _ = write!(out, "{sign}{whole}");
    if !frac.is_empty() {
        let _ = write!(out, ".{frac}");
    }
    out
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> i64 {
    values.into_iter().fold(1i64, |acc, r| acc.lcm(r.denom()))
}

pub fn ceil_integer(r: &Rational) -> i64 {
    r.ceil().to_integer()
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

struct RationalVisitor;

impl<'de> Visitor<'de> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        f.write_str("a number or a string like \"9/5\" or \"1.8\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
        Ok(int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
        i64::try_from(v).map(int).map_err(E::custom)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Rational, E> {
        // shortest round-trip decimal of the literal, e.g. 1.8 -> "1.8"
        parse_rational(&format!("{v}")).map_err(E::custom)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
        parse_rational(v).map_err(E::custom)
    }
}

/// Serde adapter: one rational as an exact string, accepting strings or numbers.
pub mod exact {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_exact(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        d.deserialize_any(RationalVisitor)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod exact_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::Deserialize;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_exact(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        #[derive(Deserialize)]
        struct Wrapped(#[serde(with = "super::exact")] Rational);
        let items: Vec<Wrapped> = Vec::deserialize(d)?;
        Ok(items.into_iter().map(|w| w.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_exactly() {
        assert_eq!(parse_rational("1.8").unwrap(), Rational::new(9, 5));
        assert_eq!(parse_rational("-0.25").unwrap(), Rational::new(-1, 4));
        assert_eq!(parse_rational("9/5").unwrap(), Rational::new(9, 5));
        assert_eq!(parse_rational("12").unwrap(), int(12));
        assert_eq!(parse_rational("1.5e2").unwrap(), int(150));
        assert_eq!(parse_rational("2e-3").unwrap(), Rational::new(1, 500));
        assert_eq!(parse_rational(".5").unwrap(), Rational::new(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for t in ["", "abc", "1/0", "1..2", "--1", "."] {
            assert!(parse_rational(t).is_err(), "{t}");
        }
    }

    #[test]
    fn formats_exact_decimals() {
        assert_eq!(format_exact(&Rational::new(27, 5)), "5.4");
        assert_eq!(format_exact(&int(6)), "6");
        assert_eq!(format_exact(&Rational::new(-3, 50)), "-0.06");
        assert_eq!(format_exact(&Rational::new(1, 3)), "1/3");
        assert_eq!(format_exact(&Rational::new(0, 1)), "0");
    }

    #[test]
    fn json_numbers_convert_via_shortest_decimal() {
        #[derive(serde::Deserialize)]
        struct W(#[serde(with = "exact")] Rational);
        let w: W = serde_json::from_str("1.8").unwrap();
        assert_eq!(w.0, Rational::new(9, 5));
        let w: W = serde_json::from_str("\"3/7\"").unwrap();
        assert_eq!(w.0, Rational::new(3, 7));
    }
}
