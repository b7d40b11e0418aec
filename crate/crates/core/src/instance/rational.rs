//! Exact rational cost parsing and JSON encoding.
//!
//! Costs may be given as JSON numbers or as strings of the form `"p/q"`,
//! `"p"` or `"d.ddd"`. Strings avoid float ingestion error.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::ParseRational(text.to_string());
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac: BigInt = frac.parse().map_err(|_| bad())?;
        let frac = BigRational::new(frac, scale);
        let int = BigRational::from_integer(int.abs());
        let value = int + frac;
        return Ok(if negative { -value } else { value });
    }
    let int: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(int))
}

pub fn format_rational(value: &BigRational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Nearest power of two at or above `value`, returned as its exponent.
///
/// `value` must be at least 1.
pub fn ceil_log2(value: &BigRational) -> u64 {
    debug_assert!(*value >= BigRational::one());
    let num = value.numer();
    let den = value.denom();
    let mut k = num.bits().saturating_sub(den.bits()).saturating_sub(1);
    while (den << k) < *num {
        k += 1;
    }
    k
}

pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn from_json_value(value: &serde_json::Value) -> Result<BigRational> {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                Ok(BigRational::from_integer(u.into()))
            } else if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(i.into()))
            } else {
                let f = n
                    .as_f64()
                    .ok_or_else(|| Error::ParseRational(n.to_string()))?;
                BigRational::from_f64(f).ok_or_else(|| Error::ParseRational(n.to_string()))
            }
        }
        serde_json::Value::String(s) => parse_rational(s),
        other => Err(Error::ParseRational(other.to_string())),
    }
}

pub(crate) fn serialize<S: Serializer>(
    value: &BigRational,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    if value.is_integer() {
        if let Some(u) = value.numer().to_u64() {
            return serializer.serialize_u64(u);
        }
    }
    serializer.serialize_str(&format_rational(value))
}

pub(crate) fn deserialize<'de, D: Deserializer<'de>>(
    deserializer: D,
) -> Result<BigRational, D::Error> {
    let value = serde_json::Value::deserialize(deserializer)?;
    from_json_value(&value).map_err(D::Error::custom)
}

/// Serde adapter for a rational encoded as number or `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JsonRational(pub BigRational);

impl Serialize for JsonRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serialize(&self.0, serializer)
    }
}

impl<'de> Deserialize<'de> for JsonRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserialize(deserializer).map(JsonRational)
    }
}
