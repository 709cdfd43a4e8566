//! Exact rational helpers.
//!
//! Every metric is computed over arbitrary-precision rationals so that the
//! algebraic identities between them hold with zero tolerance.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::ser::{SerializeMap, SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::str::FromStr;
use thiserror::Error;

/// Exact rational number used for costs and metrics.
pub type Rational = BigRational;

/// Number of significant digits in decimal renderings.
pub const DECIMAL_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse `{input}` as a rational number")]
pub struct ParseRationalError {
    pub input: String,
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p/q`, integers and plain decimals (`1.25`, `-3e2` is not accepted).
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError {
        input: input.to_string(),
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{whole_digits}{frac}");
        let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|_| err())?;
        if negative {
            num = -num;
        }
        let den = num::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(num, den));
    }
    BigInt::from_str(s)
        .map(Rational::from_integer)
        .map_err(|_| err())
}

/// Renders `value` with [`DECIMAL_DIGITS`] significant digits.
pub fn to_decimal(value: &Rational) -> String {
    if value.is_zero() {
        return "0".to_string();
    }
    let magnitude = value.abs();
    // Digits before the decimal point, computed exactly.
    let int_part = magnitude.to_integer();
    let mut lead: i64 = if int_part.is_zero() {
        let mut scaled = magnitude.clone();
        let mut exp = 0i64;
        while scaled < Rational::one() {
            scaled *= int(10);
            exp -= 1;
        }
        exp + 1
    } else {
        int_part.to_string().len() as i64
    };
    if lead > DECIMAL_DIGITS as i64 {
        lead = DECIMAL_DIGITS as i64;
    }
    let decimals = (DECIMAL_DIGITS as i64 - lead).max(0) as usize;
    let scale = num::pow(BigInt::from(10), decimals);
    let scaled = magnitude * Rational::from_integer(scale.clone());
    // round half away from zero
    let rounded = (scaled + ratio(1, 2)).floor().to_integer();
    let digits = rounded.to_string();
    let body = if decimals == 0 {
        digits
    } else {
        let padded = format!("{:0>width$}", digits, width = decimals + 1);
        let split = padded.len() - decimals;
        format!("{}.{}", &padded[..split], &padded[split..])
    };
    if value.is_negative() {
        format!("-{body}")
    } else {
        body
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Serializes as `{"num": .., "den": .., "decimal": ".."}`.
pub struct Exact<'a>(pub &'a Rational);

fn bigint_json(n: &BigInt) -> serde_json::Value {
    match n.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(n.to_string()),
    }
}

impl Serialize for Exact<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Rational", 3)?;
        s.serialize_field("num", &bigint_json(self.0.numer()))?;
        s.serialize_field("den", &bigint_json(self.0.denom()))?;
        s.serialize_field("decimal", &to_decimal(self.0))?;
        s.end()
    }
}

/// `serialize_with` adapters for rational-valued fields.
pub mod exact {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        Exact(value).serialize(serializer)
    }

    pub fn vec<S: Serializer>(values: &[Rational], serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&Exact(v))?;
        }
        seq.end()
    }

    pub fn map<S: Serializer>(
        values: &BTreeMap<usize, Rational>,
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(values.len()))?;
        for (k, v) in values {
            map.serialize_entry(&k.to_string(), &Exact(v))?;
        }
        map.end()
    }
}
