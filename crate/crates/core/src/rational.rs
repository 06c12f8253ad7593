//! Exact rational numbers used for every geometric quantity.
//!
//! Sizes arrive as decimal or fraction strings and are kept as
//! [`BigRational`] so that overlap predicates and interval membership
//! never depend on rounding. Floating point only appears inside the LP
//! solver and in human-facing reports.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse `{input}` as a rational number: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

/// Shorthand for `n/d`. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"3/5"`, `"-2"`, `"0.125"`, `".5"` or `"1.5e-3"` exactly.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let s = input.trim();
    let err = |reason| ParseRationalError {
        input: input.to_string(),
        reason,
    };
    if s.is_empty() {
        return Err(err("empty string"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_decimal(num.trim()).ok_or_else(|| err("bad numerator"))?;
        let d = parse_decimal(den.trim()).ok_or_else(|| err("bad denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(n / d);
    }
    parse_decimal(s).ok_or_else(|| err("expected a decimal or p/q fraction"))
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
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{whole}{frac}");
    let numer: BigInt = if all_digits.is_empty() {
        BigInt::zero()
    } else {
        all_digits.parse().ok()?
    };
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Huge numerators or denominators: fall back to a scaled division.
        let n = value.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = value.denom().to_f64().unwrap_or(f64::INFINITY);
        if d.is_infinite() && n.is_finite() {
            0.0
        } else {
            n / d
        }
    })
}

/// The exact dyadic value of a finite float.
pub fn from_f64_exact(value: f64) -> Rational {
    Rational::from_float(value).expect("finite float")
}

pub fn ceil_to_i64(value: &Rational) -> i64 {
    value.ceil().to_integer().to_i64().expect("ceil fits in i64")
}

pub fn floor_to_i64(value: &Rational) -> i64 {
    value.floor().to_integer().to_i64().expect("floor fits in i64")
}

/// `base^exp` for non-negative `exp`.
pub fn pow(base: &Rational, exp: u32) -> Rational {
    let numer = num_traits::pow(base.numer().clone(), exp as usize);
    let denom = num_traits::pow(base.denom().clone(), exp as usize);
    Rational::new(numer, denom)
}

pub fn min(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max(a: &Rational, b: &Rational) -> Rational {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Integer images of a list of rationals over a common denominator.
///
/// Returns `None` when the scaled numerators would not leave `headroom`
/// bits inside an `i128`, so that sums of up to `2^headroom` terms stay exact.
pub fn scale_to_integers(values: &[Rational], headroom: u32) -> Option<(Vec<i128>, BigInt)> {
    let mut denom = BigInt::one();
    for v in values {
        denom = denom.lcm(v.denom());
    }
    let limit = BigInt::one() << (126 - headroom.min(100));
    let mut out = Vec::with_capacity(values.len());
    for v in values {
        let scaled = v.numer() * (&denom / v.denom());
        if scaled.abs() >= limit {
            return None;
        }
        out.push(scaled.to_i128()?);
    }
    Some((out, denom))
}

/// Parses a rational from a JSON string or number.
pub fn rational_from_json(value: &serde_json::Value) -> Result<Rational, ParseRationalError> {
    match value {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(ParseRationalError {
            input: other.to_string(),
            reason: "expected a string or number",
        }),
    }
}

/// Serde adapter storing a [`Rational`] as its canonical string.
pub mod serde_rational {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = serde_json::Value::deserialize(d)?;
        rational_from_json(&raw).map_err(D::Error::custom)
    }
}
